#include "maninforge/report.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>
#include <unistd.h>

using namespace maninforge;
using nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

constexpr int kFormatVersion = 1;
constexpr long kLongRunningRank = 160;

enum Exit { ok = 0, violation = 2, refused = 3 };

struct Refusal : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// One directory per level; payload plus a sidecar hash, both written by rename.
class Cache {
 public:
  explicit Cache(fs::path dir) : dir_(std::move(dir)) {}

  std::optional<std::string> get(long n, const std::string& artifact) const {
    fs::path payload = file(n, artifact, ".txt"), hash = file(n, artifact, ".hash");
    std::ifstream in(payload, std::ios::binary), hin(hash);
    if (!in || !hin) return std::nullopt;
    std::stringstream ss;
    ss << in.rdbuf();
    std::string expected;
    hin >> expected;
    if (fnv1a(ss.str()) != expected) return std::nullopt;  // corrupt: recompute
    return ss.str();
  }

  void put(long n, const std::string& artifact, const std::string& text) const {
    std::error_code ec;
    fs::create_directories(dir_ / std::to_string(n), ec);
    if (ec) return;  // caching is best effort
    write_atomic(file(n, artifact, ".txt"), text);
    write_atomic(file(n, artifact, ".hash"), fnv1a(text) + "\n");
  }

 private:
  fs::path dir_;

  fs::path file(long n, const std::string& artifact, const char* ext) const {
    return dir_ / std::to_string(n) / (artifact + ".v" + std::to_string(kFormatVersion) + ext);
  }
  static void write_atomic(const fs::path& target, const std::string& text) {
    fs::path tmp = target;
    tmp += ".tmp" + std::to_string(::getpid()) + "_" +
           std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
    {
      std::ofstream out(tmp, std::ios::binary);
      out << text;
      if (!out) return;
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) fs::remove(tmp, ec);
  }
};

struct Options {
  bool json = false;
  bool long_running = false;
  std::string cache_dir;
  std::string primes;
  int class_index = 0;
  int threads = 1;
};

std::vector<long> parse_primes(const std::string& s) {
  std::vector<long> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(std::stol(item));
  return out;
}

void require_pipeline_level(long n, const Options& o) {
  if (n < 1) throw Refusal("level must be positive");
  if (!is_squarefree(n)) throw Refusal("level " + std::to_string(n) + " is not squarefree; refused");
  if (2 * genus_x0(n) > kLongRunningRank && !o.long_running)
    throw Refusal("level " + std::to_string(n) + " has cuspidal rank " + std::to_string(2 * genus_x0(n)) +
                  " > " + std::to_string(kLongRunningRank) + "; rerun with --long-running");
}

// Cached JSON artifact: computed by `make` on a miss.
template <class F>
ordered_json cached(const Cache& cache, long n, const std::string& artifact, F make) {
  if (auto text = cache.get(n, artifact)) {
    try {
      return ordered_json::parse(*text);
    } catch (const std::exception&) {
    }
  }
  ordered_json j = make();
  cache.put(n, artifact, j.dump(2) + "\n");
  return j;
}

void emit(const ordered_json& j, bool json, const std::function<void()>& human) {
  if (json)
    std::cout << j.dump(2) << "\n";
  else
    human();
}

int cmd_space(long n, const Options& o, const Cache& cache) {
  if (n < 1) throw Refusal("level must be positive");
  ordered_json j = cached(cache, n, "space", [&] { return space_json(ModSymSpace::build(n)); });
  emit(j, o.json, [&] {
    std::cout << "level " << n << "\n"
              << "  P1 size        " << j["p1_size"] << "\n"
              << "  symbols rank   " << j["rank"] << "\n"
              << "  cuspidal rank  " << j["cuspidal_rank"] << "\n"
              << "  cusps          " << j["cusps"] << "\n";
  });
  return ok;
}

int cmd_decompose(long n, const Options& o, const Cache& cache) {
  require_pipeline_level(n, o);
  ordered_json j = cached(cache, n, "decompose", [&] {
    if (genus_x0(n) == 0) return decomposition_json(n, {});
    LevelData d = LevelData::compute(n);
    return decomposition_json(n, d.classes());
  });
  emit(j, o.json, [&] {
    std::cout << "level " << n << ": " << j["classes"].size() << " newform classes\n";
    for (const auto& c : j["classes"]) {
      std::cout << "  " << c["label"].get<std::string>() << "  dim " << c["dim"];
      const auto& polys = c["hecke_polynomials"];
      if (!polys.empty()) std::cout << "  charpoly T_" << polys.begin().key() << " on S_f: " << polys.begin()->get<std::string>();
      std::cout << "\n";
    }
  });
  return ok;
}

int cmd_invariants(long n, const Options& o, const Cache& cache) {
  require_pipeline_level(n, o);
  std::vector<long> primes = parse_primes(o.primes);
  std::string artifact = "invariants";
  for (long p : primes) artifact += "-" + std::to_string(p);
  ordered_json j = cached(cache, n, artifact, [&] {
    if (genus_x0(n) == 0) return report_json(n, {});
    LevelData d = LevelData::compute(n);
    return report_json(n, deg_cong_report(d, primes));
  });
  if (o.class_index > 0) {
    ordered_json keep = ordered_json::array();
    const std::string want = std::to_string(n) + "." + std::to_string(o.class_index);
    for (const auto& c : j["classes"])
      if (c["label"] == want) keep.push_back(c);
    if (keep.empty()) throw Refusal("no class " + want);
    j["classes"] = keep;
  }
  emit(j, o.json, [&] {
    std::cout << "level " << n << "\n";
    for (const auto& c : j["classes"]) {
      std::cout << "  " << c["label"].get<std::string>() << "  dim " << c["dim"] << "  deg "
                << c["deg"].get<std::string>() << "  cong " << c["cong"].get<std::string>() << "\n";
      for (const auto& p : c["primes"])
        std::cout << "    p=" << p["p"].get<std::string>() << "  ord deg " << p["ord_deg"] << "  ord cong "
                  << p["ord_cong"] << "  inferred coker exponent " << p["inferred_coker"] << "\n";
      for (const auto& m : c["ideals"])
        std::cout << "    m | " << m["p"].get<std::string>() << "  f=" << m["residue_degree"] << "  deg_m "
                  << m["deg_part"].get<std::string>() << "  cong_m " << m["cong_part"].get<std::string>()
                  << "  gorenstein " << m["gorenstein"].get<std::string>() << " (fiber " << m["fiber_dim"]
                  << ")  dvr " << (m["dvr"].get<bool>() ? "yes" : "no") << "\n";
    }
  });
  return ok;
}

int cmd_certify(long n, const Options& o, const Cache& cache) {
  require_pipeline_level(n, o);
  ordered_json j = cached(cache, n, "certify", [&] {
    if (genus_x0(n) == 0) return certificate_json(n, {});
    LevelData d = LevelData::compute(n);
    return certificate_json(n, manin_certify(d));
  });
  emit(j, o.json, [&] {
    std::cout << "level " << n << ": " << (j["pass"].get<bool>() ? "pass" : "FAIL") << "\n";
    for (const auto& c : j["certificates"])
      std::cout << "  " << c["label"].get<std::string>() << "  " << (c["pass"].get<bool>() ? "pass" : "FAIL")
                << "  (" << c["checks"].size() << " primes checked)\n";
  });
  return j["pass"].get<bool>() ? ok : violation;
}

int cmd_scan(long lo, long hi, const Options& o, const Cache& cache) {
  if (lo < 1 || hi < lo) throw Refusal("empty level range");
  std::vector<long> levels;
  std::vector<std::string> skipped;
  for (long n = lo; n <= hi; ++n) {
    if (!is_squarefree(n)) continue;
    if (2 * genus_x0(n) > kLongRunningRank && !o.long_running) {
      skipped.push_back(std::to_string(n));
      continue;
    }
    levels.push_back(n);
  }
  std::vector<ordered_json> results(levels.size());
  std::vector<std::string> errors(levels.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < levels.size();) {
      const long n = levels[i];
      try {
        results[i] = cached(cache, n, "scan", [&] {
          if (genus_x0(n) == 0) return anomaly_json(n, {});
          LevelData d = LevelData::compute(n);
          return anomaly_json(n, anomaly_scan(d));
        });
      } catch (const TheoremViolation& e) {
        errors[i] = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < std::max(1, o.threads); ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  ordered_json j;
  j["range"] = {std::to_string(lo), std::to_string(hi)};
  j["levels"] = ordered_json::array();
  j["skipped_long_running"] = skipped;
  bool bad = false;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (!errors[i].empty()) {
      j["levels"].push_back({{"level", std::to_string(levels[i])}, {"violation", errors[i]}});
      bad = true;
    } else if (!results[i]["anomalies"].empty()) {
      j["levels"].push_back(results[i]);
    }
  }
  emit(j, o.json, [&] {
    std::size_t count = 0;
    for (const auto& l : j["levels"]) {
      if (l.contains("violation")) {
        std::cout << "level " << l["level"].get<std::string>() << ": VIOLATION " << l["violation"].get<std::string>()
                  << "\n";
        continue;
      }
      for (const auto& a : l["anomalies"]) {
        ++count;
        std::cout << "level " << l["level"].get<std::string>() << ": " << a["label"].get<std::string>() << " dim "
                  << a["dim"] << "  deg " << a["deg"].get<std::string>() << "  cong " << a["cong"].get<std::string>()
                  << "  bad ideals over 2: " << a["bad_ideals"].size() << "\n";
      }
    }
    std::cout << count << " anomalies in [" << lo << ", " << hi << "]";
    if (!skipped.empty()) std::cout << " (" << skipped.size() << " levels skipped, need --long-running)";
    std::cout << "\n";
  });
  return bad ? violation : ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"maninforge: modular degrees and congruence numbers of newform quotients of J0(n)"};
  app.require_subcommand(1);
  Options o;
  if (const char* env = std::getenv("MANINFORGE_CACHE")) o.cache_dir = env;
  std::string cli_cache;
  app.add_flag("--json", o.json, "emit JSON");
  app.add_flag("--long-running", o.long_running, "allow levels with cuspidal rank above 160");
  app.add_option("--cache-dir", cli_cache, "cache directory (default ./.maninforge, or $MANINFORGE_CACHE)");
  app.add_option("--threads", o.threads, "worker threads for scan")->check(CLI::PositiveNumber);

  long n = 0, lo = 0, hi = 0;
  auto* space = app.add_subcommand("space", "dimensions of the modular symbol spaces");
  space->add_option("n", n, "level")->required();
  auto* decompose = app.add_subcommand("decompose", "newform classes");
  decompose->add_option("n", n, "level")->required();
  auto* invariants = app.add_subcommand("invariants", "modular degree, congruence number and local diagnostics");
  invariants->add_option("n", n, "level")->required();
  invariants->add_option("--class", o.class_index, "only this class index");
  invariants->add_option("--primes", o.primes, "comma-separated primes for the local diagnostics");
  auto* certify = app.add_subcommand("certify", "deg/cong equality for elliptic classes");
  certify->add_option("n", n, "level")->required();
  auto* scan = app.add_subcommand("scan", "classes with ord_2(deg) != ord_2(cong)");
  scan->add_option("n_min", lo, "first level")->required();
  scan->add_option("n_max", hi, "last level")->required();
  for (auto* sub : {space, decompose, invariants, certify, scan}) {
    sub->add_flag("--json", o.json, "emit JSON");
    sub->add_flag("--long-running", o.long_running, "allow levels with cuspidal rank above 160");
    sub->add_option("--cache-dir", cli_cache, "cache directory");
    sub->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
  }
  CLI11_PARSE(app, argc, argv);
  if (!cli_cache.empty()) o.cache_dir = cli_cache;
  if (o.cache_dir.empty()) o.cache_dir = ".maninforge";
  Cache cache(o.cache_dir);

  try {
    if (*space) return cmd_space(n, o, cache);
    if (*decompose) return cmd_decompose(n, o, cache);
    if (*invariants) return cmd_invariants(n, o, cache);
    if (*certify) return cmd_certify(n, o, cache);
    if (*scan) return cmd_scan(lo, hi, o, cache);
  } catch (const Refusal& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return refused;
  } catch (const TheoremViolation& e) {
    std::cerr << "theorem-level invariant violated: " << e.what() << "\n";
    return violation;
  }
  return ok;
}
