#include "maninforge/report.hpp"

namespace maninforge {

using nlohmann::ordered_json;

std::string rational_string(const Rational& q) { return q.get_str(); }

ordered_json space_json(const ModSymSpace& space) {
  ordered_json j;
  j["level"] = std::to_string(space.level());
  j["p1_size"] = space.p1().size();
  j["rank"] = space.rank();
  j["cuspidal_rank"] = space.cuspidal_rank();
  j["cusps"] = space.cusp_count();
  return j;
}

ordered_json class_json(const NewformClass& cls) {
  ordered_json j;
  j["label"] = cls.label();
  j["dim"] = cls.dimension;
  j["defining_polynomial"] = to_string(cls.defining);
  ordered_json eig = ordered_json::object();
  for (const auto& [l, c] : cls.eigenvalues) {
    ordered_json v = ordered_json::array();
    for (const auto& x : c) v.push_back(rational_string(x));
    eig[std::to_string(l)] = v;
  }
  j["eigenvalues"] = eig;
  ordered_json polys = ordered_json::object();
  for (const auto& [l, f] : cls.hecke_polys) polys[std::to_string(l)] = to_string(f);
  j["hecke_polynomials"] = polys;
  return j;
}

ordered_json decomposition_json(long level, const std::vector<NewformClass>& classes) {
  ordered_json j;
  j["level"] = std::to_string(level);
  j["classes"] = ordered_json::array();
  for (const auto& c : classes) j["classes"].push_back(class_json(c));
  return j;
}

ordered_json report_json(long level, const std::vector<DegCongReport>& reports) {
  ordered_json j;
  j["level"] = std::to_string(level);
  j["classes"] = ordered_json::array();
  for (const auto& r : reports) {
    ordered_json c;
    c["label"] = r.label;
    c["dim"] = r.dimension;
    c["deg"] = r.deg.get_str();
    c["cong"] = r.cong.get_str();
    c["primes"] = ordered_json::array();
    for (const auto& p : r.primes)
      c["primes"].push_back({{"p", std::to_string(p.p)},
                             {"ord_deg", p.ord_deg},
                             {"ord_cong", p.ord_cong},
                             {"inferred_coker", p.inferred_coker}});
    c["ideals"] = ordered_json::array();
    for (const auto& d : r.ideals) {
      ordered_json m;
      m["p"] = std::to_string(d.p);
      m["residue_degree"] = d.residue_degree;
      m["gorenstein"] = to_string(d.gorenstein.verdict);
      m["gorenstein_guard"] = d.gorenstein.guard;
      m["fiber_dim"] = d.gorenstein.fiber_dim;
      m["dvr"] = d.dvr;
      m["cotangent_dim"] = d.cotangent;
      m["u_p_sign"] = d.u_p_sign ? ordered_json(*d.u_p_sign) : ordered_json(nullptr);
      m["deg_part"] = d.deg_part.get_str();
      m["cong_part"] = d.cong_part.get_str();
      c["ideals"].push_back(m);
    }
    j["classes"].push_back(c);
  }
  return j;
}

ordered_json certificate_json(long level, const std::vector<ManinCertificate>& certs) {
  ordered_json j;
  j["level"] = std::to_string(level);
  j["scope"] = "checks ord_p(deg_f) = ord_p(cong_f) for dimension-1 classes; not a statement about differentials";
  j["certificates"] = ordered_json::array();
  bool all = true;
  for (const auto& c : certs) {
    ordered_json e;
    e["label"] = c.label;
    e["pass"] = c.pass;
    e["checks"] = ordered_json::array();
    for (const auto& k : c.checks)
      e["checks"].push_back({{"p", std::to_string(k.p)},
                             {"ord_deg", k.ord_deg},
                             {"ord_cong", k.ord_cong},
                             {"equality", "ord_p(deg) = ord_p(cong)"},
                             {"pass", k.pass}});
    all = all && c.pass;
    j["certificates"].push_back(e);
  }
  j["pass"] = all;
  return j;
}

ordered_json anomaly_json(long level, const std::vector<Anomaly>& anomalies) {
  ordered_json j;
  j["level"] = std::to_string(level);
  j["anomalies"] = ordered_json::array();
  for (const auto& a : anomalies) {
    ordered_json e = report_json(level, {a.report})["classes"][0];
    e["bad_ideals"] = ordered_json::array();
    for (const auto& d : a.bad_ideals)
      e["bad_ideals"].push_back({{"p", std::to_string(d.p)},
                                 {"residue_degree", d.residue_degree},
                                 {"fiber_dim", d.gorenstein.fiber_dim},
                                 {"cotangent_dim", d.cotangent}});
    j["anomalies"].push_back(e);
  }
  return j;
}

}  // namespace maninforge
