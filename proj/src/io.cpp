#include "lipfree/io.hpp"

#include <fstream>
#include <sstream>

namespace lipfree {

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (double v : m.row(i)) row.push_back(number_to_json(v));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array()) throw Error("matrix: expected an array of rows");
  std::vector<std::vector<double>> rows;
  for (const auto& r : j) {
    if (!r.is_array()) throw Error("matrix: expected an array of rows");
    std::vector<double> row;
    for (const auto& v : r) row.push_back(number_from_json(v));
    rows.push_back(std::move(row));
  }
  return Matrix::from_rows(rows);
}

Json space_to_json(const FiniteMetricSpace& space) {
  Json j = {{"points", space.names}, {"metric", matrix_to_json(space.dist)}, {"base_point", space.base}};
  if (space.grid) {
    j["grid"] = {{"dims", space.grid->dims}, {"spacing", space.grid->spacing}, {"ground", to_string(space.grid->ground)}};
  }
  return j;
}

FiniteMetricSpace space_from_json(const Json& j, double tol) {
  if (!j.is_object()) throw Error("space: expected an object");
  FiniteMetricSpace space;
  if (j.contains("generator")) {
    const auto kind = j.at("generator").get<std::string>();
    if (kind == "grid") {
      space = make_grid_space(j.at("dims").get<std::vector<std::size_t>>(), j.at("spacing").get<double>(),
                              ground_from_string(j.value("ground", std::string("linf"))));
    } else if (kind == "random") {
      space = make_random_space(j.at("n").get<std::size_t>(), j.value("seed", std::uint64_t{0}), j.value("lo", 0.5),
                                j.value("hi", 2.0));
    } else {
      throw Error("space: unknown generator '" + kind + "'");
    }
    if (j.contains("base_point")) space.base = j.at("base_point").get<Index>();
    if (space.base >= space.size()) throw Error("space: base_point out of range");
    return space;
  }
  Matrix dist = matrix_from_json(j.at("metric"));
  std::vector<std::string> names = j.value("points", std::vector<std::string>{});
  space = make_space(std::move(dist), j.value("base_point", Index{0}), std::move(names), tol);
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    space.grid = GridInfo{g.at("dims").get<std::vector<std::size_t>>(), g.at("spacing").get<double>(),
                          ground_from_string(g.value("ground", std::string("linf")))};
    if (space.grid->point_count() != space.size()) throw Error("space: grid metadata does not match the metric");
  }
  return space;
}

Json cover_to_json(const CoverFamily& c) {
  return {{"sets", c.sets}, {"order_bound", c.order_bound}, {"is_cover", c.is_cover}, {"verified", c.verified}};
}

CoverFamily cover_from_json(const Json& j) {
  CoverFamily c;
  c.sets = j.at("sets").get<std::vector<IndexSet>>();
  c.order_bound = j.value("order_bound", -1);
  c.is_cover = j.value("is_cover", false);
  c.verified = j.value("verified", false);
  return c;
}

Json net_cover_to_json(const NetAndCover& nc) {
  return {{"sets", nc.sets}, {"net", nc.net}, {"eps", nc.eps}, {"order_bound", nc.order_bound}};
}

NetAndCover net_cover_from_json(const Json& j) {
  NetAndCover nc;
  nc.sets = j.at("sets").get<std::vector<IndexSet>>();
  nc.net = j.at("net").get<std::vector<Index>>();
  nc.eps = j.at("eps").get<double>();
  nc.order_bound = j.at("order_bound").get<int>();
  return nc;
}

Json free_element_to_json(const FreeElement& mu) {
  Json terms = Json::array();
  for (const auto& t : mu.terms) terms.push_back({t.point, t.weight});
  return {{"terms", terms}};
}

FreeElement free_element_from_json(const Json& j) {
  std::vector<Term> terms;
  for (const auto& t : j.at("terms")) terms.push_back({t.at(0).get<Index>(), t.at(1).get<double>()});
  return FreeElement::from_terms(std::move(terms));
}

Json weight_operator_to_json(const WeightOperator& w) {
  Json rows = Json::array();
  for (const auto& row : w.rows) {
    Json r = Json::array();
    for (const auto& e : row) r.push_back({e.column, e.value});
    rows.push_back(std::move(r));
  }
  return {{"domain", w.domain}, {"rows", rows}, {"partition_type", w.partition_type}};
}

WeightOperator weight_operator_from_json(const Json& j) {
  WeightOperator w;
  w.domain = j.at("domain").get<std::vector<Index>>();
  w.partition_type = j.value("partition_type", false);
  for (const auto& r : j.at("rows")) {
    std::vector<Weight> entries;
    for (const auto& e : r) {
      const auto col = e.at(0).get<std::size_t>();
      if (col >= w.domain.size()) throw Error("weight operator: column out of range");
      entries.push_back({col, e.at(1).get<double>()});
    }
    w.rows.push_back(make_weight_row(std::move(entries)));
  }
  return w;
}

Json prop33_to_json(const Prop33Bundle& b, bool with_matrices) {
  Json j = {{"eps", b.eps},
            {"r", b.r},
            {"base", b.base},
            {"net_cover", net_cover_to_json(b.nc)},
            {"norm_E", b.e_norm.norm},
            {"norm_E_witness", {b.e_norm.x, b.e_norm.y}},
            {"norm_E_programs", b.e_norm.programs}};
  if (with_matrices) {
    j["lambda"] = weight_operator_to_json(b.lambda);
    j["tilde_d"] = matrix_to_json(b.tilde_d);
    j["hat_d"] = matrix_to_json(b.hat_d);
    j["bar_d"] = matrix_to_json(b.bar_d);
  }
  return j;
}

Json perturbed_to_json(const PerturbedBundle& p, bool with_matrices) {
  Json j = {{"admission", p.admission},
            {"radius", p.radius},
            {"claimed_bound", p.claimed_bound},
            {"norm_G", p.g_norm.norm},
            {"norm_G_witness", {p.g_norm.x, p.g_norm.y}},
            {"headroom", p.claimed_bound / std::max(p.g_norm.norm, 1e-300)}};
  if (with_matrices) {
    j["e"] = matrix_to_json(p.e);
    j["mu"] = weight_operator_to_json(p.mu);
  }
  return j;
}

Json section4_to_json(const Section4Bundle& b, bool with_matrices) {
  Json j = {{"n", b.n},
            {"m", b.m},
            {"nu", b.nu},
            {"eps", b.eps},
            {"gamma", b.gamma},
            {"eta", b.eta},
            {"xi", number_to_json(b.xi)},
            {"dilation", b.dilation},
            {"K_cover", net_cover_to_json(b.k_cover)},
            {"V_members", b.v_members},
            {"V", b.v},
            {"V1", b.v12.inner},
            {"V2", b.v12.outer},
            {"exhaustion", b.exhaustion},
            {"extension_distortion", b.extension.distortion},
            {"extension_bound", b.extension.bound},
            {"inner", prop33_to_json(b.inner, false)}};
  if (with_matrices) {
    j["d2"] = matrix_to_json(b.extension.metric);
    j["bar_d"] = matrix_to_json(b.bar_d);
  }
  return j;
}

Json gluing_config_to_json(const GluingConfig& cfg, const Json& space_json) {
  return {{"space", space_json},
          {"K", cfg.k},
          {"base_point", cfg.space.base},
          {"thresholds", cfg.thresholds},
          {"dimK", cfg.dim_k}};
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& ex) {
    throw Error("malformed JSON in " + path.string() + ": " + ex.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed for " + path.string());
}

std::string certificate_csv(const Certificate& c) {
  std::ostringstream out;
  out.precision(17);
  out << "name,relation,claimed,measured,tol,pass,warning\n";
  for (const auto& ch : c.checks()) {
    std::string name = ch.name;
    for (char& x : name) {
      if (x == ',' || x == '"') x = ';';
    }
    out << '"' << name << "\"," << to_string(ch.relation) << ',' << ch.claimed << ',' << ch.measured << ','
        << ch.tol << ',' << (ch.pass ? "true" : "false") << ',' << (ch.warning ? "true" : "false") << '\n';
  }
  return out.str();
}

}  // namespace lipfree
