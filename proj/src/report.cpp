#include "crn/report.hpp"

#include <cstdio>

namespace crn {

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

void dump(const Json& j, std::string& out) {
  switch (j.type()) {
    case nlohmann::json::value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += nlohmann::json(it.key()).dump();
        out += ':';
        dump(it.value(), out);
      }
      out += '}';
      break;
    }
    case nlohmann::json::value_t::array: {
      out += '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ',';
        dump(j[i], out);
      }
      out += ']';
      break;
    }
    case nlohmann::json::value_t::number_float: {
      const double v = j.get<double>();
      out += std::isfinite(v) ? format_real(v) : "null";
      break;
    }
    default:
      out += j.dump();
  }
}

Json vec(const RealVector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }
Json ivec(const IntVector& v) { return std::vector<std::int64_t>(v.data(), v.data() + v.size()); }

}  // namespace

std::string dump_json(const Json& j) {
  std::string out;
  dump(j, out);
  return out;
}

Json network_json(const ReactionNetwork& n) {
  Json complexes = Json::array();
  for (const auto& c : n.complexes()) complexes.push_back(ivec(c.counts));
  Json transitions = Json::array();
  for (const auto& t : n.transitions()) {
    Json tj;
    tj["source"] = t.source;
    tj["target"] = t.target;
    tj["rate"] = t.rate;
    transitions.push_back(tj);
  }
  Json j;
  j["species"] = n.species().names();
  j["complexes"] = complexes;
  j["transitions"] = transitions;
  return j;
}

Json structure_json(const StructureReport& r) {
  Json laws = Json::array();
  for (const auto& w : r.conservation_laws) laws.push_back(ivec(w));
  Json j;
  j["complexes"] = r.num_complexes;
  j["components"] = r.num_components;
  j["strong_components"] = r.num_strong_components;
  j["weakly_reversible"] = r.weakly_reversible;
  j["stoich_dim"] = r.stoich_dim;
  j["deficiency"] = r.deficiency;
  j["conservation_laws"] = laws;
  return j;
}

Json equilibrium_json(const EquilibriumResult& e) {
  Json j;
  j["x"] = vec(e.x);
  j["alpha"] = vec(e.alpha);
  j["residual_master"] = e.residual_master;
  j["residual_rate"] = e.residual_rate;
  return j;
}

Json spectrum_json(const Spectrum<double>& s, double group_tol) {
  std::vector<double> values;
  std::vector<Index> mult;
  for (const auto& g : s.grouped(group_tol)) {
    values.push_back(g.value);
    mult.push_back(g.multiplicity);
  }
  Json j;
  j["eigenvalues"] = values;
  j["multiplicities"] = mult;
  return j;
}

Json ssa_json(const SsaResult& r) {
  Json j;
  j["trials"] = r.end_states.size();
  j["seed"] = r.seed;
  j["t"] = r.t_end;
  j["mean"] = vec(r.mean);
  j["variance"] = vec(r.variance);
  return j;
}

std::string trajectory_csv(const ReactionNetwork& n, const Trajectory& traj) {
  std::string out = "t";
  for (const auto& s : n.species().names()) out += "," + s;
  out += "\n";
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    out += format_real(traj.times[i]);
    for (Index k = 0; k < traj.states[i].size(); ++k) out += "," + format_real(traj.states[i](k));
    out += "\n";
  }
  return out;
}

std::string distribution_csv(const ReactionNetwork& n, const StateSpace& space, const ProbabilityVector& psi) {
  std::string out = "state_index";
  for (const auto& s : n.species().names()) out += "," + s;
  out += ",probability\n";
  for (Index i = 0; i < space.size(); ++i) {
    out += std::to_string(i);
    for (Index k = 0; k < space.state(i).size(); ++k) out += "," + std::to_string(space.state(i)(k));
    out += "," + format_real(psi(i)) + "\n";
  }
  return out;
}

}  // namespace crn
