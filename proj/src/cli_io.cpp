#include "phylomst/cli_io.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "phylomst/errors.hpp"

namespace phylomst {

namespace {

auto open_input(const std::filesystem::path& path) -> std::ifstream {
  auto in = std::ifstream{path};
  if (!in) fail(ErrorKind::parse, fmt::format("cannot open '{}'", path.string()));
  return in;
}

auto open_output(const std::filesystem::path& path) -> std::ofstream {
  auto out = std::ofstream{path, std::ios::binary};
  if (!out) fail(ErrorKind::parse, fmt::format("cannot write '{}'", path.string()));
  return out;
}

auto trim(std::string_view s) -> std::string_view {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

auto split_fields(std::string_view line) -> std::vector<std::string> {
  auto fields = std::vector<std::string>{};
  auto stream = std::istringstream{std::string{line}};
  for (auto field = std::string{}; stream >> field;) fields.push_back(field);
  return fields;
}

auto is_skippable(std::string_view line) -> bool {
  const auto t = trim(line);
  return t.empty() || t.front() == '#';
}

template <typename T>
auto parse_number(const std::string& text, const std::string& source, int line_no, const char* what) -> T {
  try {
    auto used = std::size_t{0};
    T value{};
    if constexpr (std::is_floating_point_v<T>) {
      value = std::stod(text, &used);
    } else {
      const auto wide = std::stoll(text, &used);
      if (wide < std::numeric_limits<T>::min() || wide > std::numeric_limits<T>::max()) throw std::out_of_range{text};
      value = static_cast<T>(wide);
    }
    if (used != text.size()) throw std::invalid_argument{text};
    return value;
  } catch (const std::logic_error&) {
    fail(ErrorKind::parse, fmt::format("{}:{}: invalid {} '{}'", source, line_no, what, text));
  }
}

auto format_number(double x) -> std::string {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return fmt::format("{:.12g}", x);
}

auto newick_label(const std::string& id) -> std::string {
  const auto plain = std::all_of(id.begin(), id.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' || c == '@' || c == '|' || c == '/';
  });
  if (plain && !id.empty()) return id;
  auto quoted = std::string{"'"};
  for (auto c : id) {
    if (c == '\'') quoted += '\'';
    quoted += c;
  }
  return quoted + "'";
}

}  // namespace

auto parse_fasta(std::istream& in, const std::string& source, const SiteModel& model) -> std::vector<Sample> {
  auto samples = std::vector<Sample>{};
  auto header_lines = std::vector<int>{};
  auto line = std::string{};
  auto line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t.front() == ';') continue;
    if (t.front() == '>') {
      const auto fields = split_fields(t.substr(1));
      if (fields.empty()) fail(ErrorKind::parse, fmt::format("{}:{}: empty FASTA header", source, line_no));
      for (auto i = std::size_t{0}; i < samples.size(); ++i) {
        if (samples[i].id == fields[0]) {
          fail(ErrorKind::parse, fmt::format("{}:{}: duplicate id '{}' (first seen on line {})", source, line_no,
                                             fields[0], header_lines[i]));
        }
      }
      samples.push_back({fields[0], {}, std::nullopt});
      header_lines.push_back(line_no);
      continue;
    }
    if (samples.empty()) fail(ErrorKind::parse, fmt::format("{}:{}: sequence data before the first header", source, line_no));
    for (auto c : t) {
      if (std::isspace(static_cast<unsigned char>(c))) continue;
      const auto upper = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      if (model.alphabet().find(upper) == std::string::npos) {
        fail(ErrorKind::parse, fmt::format("{}:{}: record '{}' contains '{}', not in the {} alphabet \"{}\"", source,
                                           line_no, samples.back().id, c, model.name(), model.alphabet()));
      }
      samples.back().sequence.push_back(upper);
    }
  }
  if (samples.empty()) fail(ErrorKind::parse, fmt::format("{}: no FASTA records", source));
  for (auto i = std::size_t{0}; i < samples.size(); ++i) {
    if (samples[i].sequence.empty()) {
      fail(ErrorKind::parse, fmt::format("{}:{}: record '{}' is empty", source, header_lines[i], samples[i].id));
    }
    if (samples[i].sequence.size() != samples[0].sequence.size()) {
      fail(ErrorKind::parse, fmt::format("{}:{}: record '{}' has length {}, expected {}", source, header_lines[i],
                                         samples[i].id, samples[i].sequence.size(), samples[0].sequence.size()));
    }
  }
  return samples;
}

auto parse_fasta(const std::filesystem::path& path, const SiteModel& model) -> std::vector<Sample> {
  auto in = open_input(path);
  return parse_fasta(in, path.string(), model);
}

auto parse_locations(std::istream& in, const std::string& source) -> std::map<std::string, NodeId> {
  auto result = std::map<std::string, NodeId>{};
  auto line = std::string{};
  auto line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_skippable(line)) continue;
    const auto fields = split_fields(line);
    if (fields.size() != 2) {
      fail(ErrorKind::parse, fmt::format("{}:{}: expected 'sample_id<TAB>node'", source, line_no));
    }
    const auto node = parse_number<NodeId>(fields[1], source, line_no, "node id");
    if (node < 0) fail(ErrorKind::parse, fmt::format("{}:{}: negative node id {}", source, line_no, node));
    if (!result.emplace(fields[0], node).second) {
      fail(ErrorKind::parse, fmt::format("{}:{}: duplicate sample id '{}'", source, line_no, fields[0]));
    }
  }
  return result;
}

auto parse_locations(const std::filesystem::path& path) -> std::map<std::string, NodeId> {
  auto in = open_input(path);
  return parse_locations(in, path.string());
}

void attach_locations(std::vector<Sample>& samples, const std::map<std::string, NodeId>& locations, int node_count) {
  for (auto& s : samples) {
    const auto it = locations.find(s.id);
    if (it == locations.end()) fail(ErrorKind::parse, fmt::format("no location given for sample '{}'", s.id));
    if (it->second >= node_count) {
      fail(ErrorKind::parse,
           fmt::format("sample '{}' is at node {}, but the graph has nodes 0..{}", s.id, it->second, node_count - 1));
    }
    s.location = it->second;
  }
}

auto parse_geo_graph(std::istream& in, const std::string& source) -> GeoGraph {
  auto edges = std::vector<GeoEdge>{};
  auto line = std::string{};
  auto line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_skippable(line)) continue;
    const auto fields = split_fields(line);
    if (fields.size() != 3) fail(ErrorKind::parse, fmt::format("{}:{}: expected 'u<TAB>v<TAB>weight'", source, line_no));
    const auto u = parse_number<NodeId>(fields[0], source, line_no, "node id");
    const auto v = parse_number<NodeId>(fields[1], source, line_no, "node id");
    const auto w = parse_number<double>(fields[2], source, line_no, "weight");
    if (u < 0 || v < 0) fail(ErrorKind::parse, fmt::format("{}:{}: node ids must be nonnegative", source, line_no));
    if (!(w > 0.0) || !std::isfinite(w)) {
      fail(ErrorKind::parse, fmt::format("{}:{}: weight must be positive, got {}", source, line_no, fields[2]));
    }
    edges.push_back({u, v, w});
  }
  if (edges.empty()) fail(ErrorKind::parse, fmt::format("{}: graph has no edges", source));
  return GeoGraph{std::move(edges)};
}

auto parse_geo_graph(const std::filesystem::path& path) -> GeoGraph {
  auto in = open_input(path);
  return parse_geo_graph(in, path.string());
}

auto parse_gtr_model(std::istream& in, const std::string& source) -> SiteModel {
  auto tokens = std::vector<std::string>{};
  auto line = std::string{};
  auto line_no = 0;
  auto m = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_skippable(line)) continue;
    auto fields = split_fields(line);
    if (m == 0) {
      if (fields.size() != 2 || fields[0] != "gtr") {
        fail(ErrorKind::parse, fmt::format("{}:{}: expected header 'gtr m'", source, line_no));
      }
      m = parse_number<int>(fields[1], source, line_no, "alphabet size");
      if (m < 2) fail(ErrorKind::parse, fmt::format("{}:{}: alphabet size must be at least 2", source, line_no));
      continue;
    }
    tokens.insert(tokens.end(), fields.begin(), fields.end());
  }
  if (m == 0) fail(ErrorKind::parse, fmt::format("{}: missing 'gtr m' header", source));

  const auto mm = static_cast<std::size_t>(m);
  const auto strict = mm * (mm - 1) / 2;
  const auto with_diagonal = mm * (mm + 1) / 2;
  if (tokens.size() != mm + strict && tokens.size() != mm + with_diagonal) {
    fail(ErrorKind::parse, fmt::format("{}: expected {} stationary values and {} or {} exchangeabilities, got {} numbers",
                                       source, m, strict, with_diagonal, tokens.size()));
  }
  const auto diagonal = tokens.size() == mm + with_diagonal;
  auto pi = std::vector<double>(mm);
  for (auto i = std::size_t{0}; i < mm; ++i) pi[i] = parse_number<double>(tokens[i], source, line_no, "frequency");
  auto s = std::vector<double>(mm * mm, 0.0);
  auto next = mm;
  for (auto a = std::size_t{0}; a < mm; ++a) {
    for (auto b = diagonal ? a : a + 1; b < mm; ++b) {
      const auto value = parse_number<double>(tokens[next++], source, line_no, "exchangeability");
      if (a == b) {
        if (value != 0.0) fail(ErrorKind::parse, fmt::format("{}: diagonal exchangeability must be 0", source));
        continue;
      }
      s[a * mm + b] = value;
      s[b * mm + a] = value;
    }
  }
  return SiteModel::gtr(std::move(pi), std::move(s));
}

auto parse_gtr_model(const std::filesystem::path& path) -> SiteModel {
  auto in = open_input(path);
  return parse_gtr_model(in, path.string());
}

void write_fasta(std::ostream& out, std::span<const Sample> samples) {
  for (const auto& s : samples) out << '>' << s.id << '\n' << s.sequence << '\n';
}

void write_locations(std::ostream& out, std::span<const Sample> samples) {
  for (const auto& s : samples) {
    if (s.location) out << s.id << '\t' << *s.location << '\n';
  }
}

void write_geo_graph(std::ostream& out, const GeoGraph& graph) {
  for (const auto& e : graph.edges()) out << e.u << '\t' << e.v << '\t' << format_number(e.weight) << '\n';
}

auto truth_json(const TruthTree& truth) -> nlohmann::json {
  auto nodes = nlohmann::json::array();
  for (const auto& node : truth.nodes) {
    auto entry = nlohmann::json{{"id", node.label.id},
                                {"leaf", node.leaf},
                                {"duration", node.duration},
                                {"sequence", node.label.sequence}};
    entry["parent"] = node.parent ? nlohmann::json(truth.nodes[*node.parent].label.id) : nlohmann::json(nullptr);
    entry["location"] = node.label.location ? nlohmann::json(*node.label.location) : nlohmann::json(nullptr);
    nodes.push_back(std::move(entry));
  }
  return {{"root", truth.nodes[truth.root].label.id}, {"nodes", std::move(nodes)}};
}

auto to_newick(const PhyloTree& tree) -> std::string {
  auto out = std::string{};
  // Explicit stack: deep chains would overflow recursion.
  struct Frame {
    std::size_t node;
    std::vector<std::size_t> children;
    std::size_t next = 0;
  };
  auto stack = std::vector<Frame>{};
  stack.push_back({tree.root, tree.children(tree.root)});
  if (!stack.back().children.empty()) out += '(';
  while (!stack.empty()) {
    auto& top = stack.back();
    if (top.next < top.children.size()) {
      if (top.next > 0) out += ',';
      const auto child = top.children[top.next++];
      auto grandchildren = tree.children(child);
      if (!grandchildren.empty()) out += '(';
      stack.push_back({child, std::move(grandchildren)});
      continue;
    }
    if (!top.children.empty()) out += ')';
    out += newick_label(tree.ids[top.node]);
    stack.pop_back();
  }
  return out + ";";
}

auto parse_model_arg(const std::string& arg, double mu) -> ModelSpec {
  auto spec = ModelSpec{};
  spec.mu = mu;
  if (arg == "binary" || arg == "jc69") {
    spec.name = arg;
  } else if (arg.rfind("gtr:", 0) == 0 && arg.size() > 4) {
    spec.name = "gtr";
    spec.gtr_file = arg.substr(4);
  } else {
    fail(ErrorKind::parse, fmt::format("unknown model '{}' (expected binary, jc69 or gtr:FILE)", arg));
  }
  return spec;
}

auto load_model(const ModelSpec& spec) -> SiteModel {
  if (spec.name == "binary") return SiteModel::binary_symmetric(spec.mu);
  if (spec.name == "jc69") return SiteModel::jc69(spec.mu);
  if (spec.name == "gtr" && spec.gtr_file) {
    return parse_gtr_model(*spec.gtr_file);
  }
  fail(ErrorKind::parse, fmt::format("unknown model '{}'", spec.name));
}

auto eps_ladder(double eps, const GeoBounds& bounds) -> EpsLadder {
  const auto neg_log_b = -std::log(bounds.upper);
  const auto eps3 = std::min(eps / 8.0, neg_log_b);
  const auto eps2 = 0.5 * eps3 * neg_log_b;
  return {eps, eps3, eps2, bounds.lower * eps2, bounds};
}

auto infer_tree(const std::vector<Sample>& samples, const CostModel& model, const std::optional<std::string>& root)
    -> RunResult {
  auto result = RunResult{};
  result.costs = build_cost_matrix(samples, model);
  const auto mst = kruskal_mst(result.costs);
  result.tree = root_tree(result.costs.ids, mst, root);
  for (const auto& e : mst) result.total_weight += result.costs.weight(e.u, e.v);

  const auto oracle = SampleCostOracle{samples, model};
  result.tree_cost_directed = tree_cost_directed(result.tree, oracle);
  result.tree_cost_symmetric = tree_cost_symmetric(result.tree, oracle);
  result.newick = to_newick(result.tree);

  auto edges = std::string{"parent\tchild\tw\tphi_uv\tt_star\n"};
  for (const auto& e : result.tree.edges) {
    const auto details = oracle.edge_details(e.u, e.v);
    edges += fmt::format("{}\t{}\t{}\t{}\t{}\n", result.tree.ids[e.u], result.tree.ids[e.v],
                         format_number(result.costs.weight(e.u, e.v)), format_number(details.phi),
                         format_number(details.t_star));
  }
  result.edges_tsv = std::move(edges);

  result.report = {
      {"k", samples.size()},
      {"n", samples.front().sequence.size()},
      {"model", model.site.name()},
      {"mode", model.mode == EdgeMode::independent ? "independent" : "shared-t"},
      {"log_base", "e"},
      {"root", result.tree.ids[result.tree.root]},
      {"total_w", result.total_weight},
      {"tree_cost_directed", result.tree_cost_directed},
      {"tree_cost_symmetric", result.tree_cost_symmetric},
      {"eps_ladder", nullptr},
      {"version", k_version},
  };
  return result;
}

auto run_pipeline(const RunConfig& config) -> RunResult {
  const auto started = std::chrono::steady_clock::now();
  if (!(config.eps > 0.0 && config.eps < 1.0)) {
    fail(ErrorKind::parse, fmt::format("--eps must lie in (0, 1), got {}", config.eps));
  }
  if (config.locations.has_value() != config.geo_graph.has_value()) {
    fail(ErrorKind::parse, "--locations and --geo-graph must be given together");
  }

  auto model = CostModel{load_model(config.model), std::nullopt, config.mode};
  auto samples = parse_fasta(config.fasta, model.site);

  auto ladder = std::optional<EpsLadder>{};
  if (config.geo_graph) {
    auto graph = parse_geo_graph(*config.geo_graph);
    const auto locations = parse_locations(*config.locations);
    attach_locations(samples, locations, graph.node_count());
    auto geo = make_geography(std::move(graph), 0.0);
    ladder = eps_ladder(config.eps, geo.bounds);
    geo.eps3 = ladder->eps3;
    model.geo = std::move(geo);
  }

  auto result = infer_tree(samples, model, config.root);
  result.ladder = ladder;
  if (ladder) {
    result.report["eps_ladder"] = {{"eps", ladder->eps},   {"eps3", ladder->eps3},         {"eps2", ladder->eps2},
                                   {"eps1", ladder->eps1}, {"A", ladder->bounds.lower}, {"B", ladder->bounds.upper}};
  }
  result.report["seed"] = config.seed;
  result.report["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  if (config.out_newick) open_output(*config.out_newick) << result.newick << '\n';
  if (config.out_edges) open_output(*config.out_edges) << result.edges_tsv;
  if (config.out_report) open_output(*config.out_report) << result.report.dump(2) << '\n';
  return result;
}

}  // namespace phylomst
