#include "latent_diversity/report_json.hpp"

#include <cmath>
#include <cstdio>

namespace latent_diversity {

using nlohmann::json;

json to_json(const DiversityScore& score) {
  return json{{"kind", to_string(score.kind)},
              {"k", score.k_used},
              {"n", score.n_samples},
              {"space", score.space.name()},
              {"value", score.value}};
}

json to_json(const FidScore& score) {
  return json{{"kind", "FID"},
              {"n_gen", score.n_gen},
              {"n_ref", score.n_ref},
              {"space", score.space.name()},
              {"sqrtm_jitter", score.sqrtm_jitter},
              {"value", score.value}};
}

json to_json(const ComparisonReport& report) {
  json per_set = json::object();
  for (const auto& [name, scores] : report.per_set) {
    json values = json::array();
    for (const auto& s : scores) values.push_back(s.value);
    per_set[name] = std::move(values);
  }
  json pairwise = json::array();
  for (const auto& e : report.pairwise) {
    pairwise.push_back(json{{"a", e.set_a},
                            {"b", e.set_b},
                            {"statistic", e.result.statistic},
                            {"p_value", e.result.p_value},
                            {"exact", e.result.exact},
                            {"significant_at", e.result.significant_at}});
  }
  return json{{"kind", to_string(report.kind)},
              {"k", report.k_used},
              {"space", report.space.name()},
              {"test", to_string(report.test)},
              {"caveat", report.caveat},
              {"plan", json{{"n_subsets", report.plan.n_subsets},
                            {"subset_size", report.plan.subset_size},
                            {"seed", report.plan.seed}}},
              {"per_set", std::move(per_set)},
              {"pairwise", std::move(pairwise)}};
}

namespace {

void dump_into(const json& j, std::string& out) {
  switch (j.type()) {
    case json::value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {  // std::map storage: keys already sorted
        if (!first) out += ',';
        first = false;
        out += json(it.key()).dump();
        out += ':';
        dump_into(it.value(), out);
      }
      out += '}';
      break;
    }
    case json::value_t::array: {
      out += '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ',';
        dump_into(j[i], out);
      }
      out += ']';
      break;
    }
    case json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) {
        out += "null";
        break;
      }
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      std::string text = buf;
      if (text.find_first_of(".eE") == std::string::npos) text += ".0";
      out += text;
      break;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

std::string stable_dump(const json& doc) {
  std::string out;
  dump_into(doc, out);
  return out;
}

}  // namespace latent_diversity
