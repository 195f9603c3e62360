// Command-line front door: generate modules, compute zip invariants,
// enumerate orbit tables, classify, and run the brute-force verifier
// suites. All I/O is JSON; outputs are deterministic given the inputs and
// the seed. Exit codes: 0 success, 1 property violation, 2 usage error,
// 3 invalid input.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "eozip/json_io.hpp"
#include "eozip/orbits.hpp"
#include "eozip/sampling.hpp"
#include "eozip/zip.hpp"

namespace {

using namespace eozip;

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInvalid = 3;

// "GL:2:10" -> GL_2 with weights (1,0); "GSp:4:1100" -> Siegel g=2.
GroupSpecPtr parse_group(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() != 3)
    throw InvalidInput("group must look like GL:2:10 or GSp:4:1100");
  GroupKind kind;
  if (parts[0] == "GL")
    kind = GroupKind::GL;
  else if (parts[0] == "GSp")
    kind = GroupKind::GSp;
  else
    throw InvalidInput("group kind must be GL or GSp");
  unsigned m = static_cast<unsigned>(std::stoul(parts[1]));
  if (parts[2].size() != m)
    throw InvalidInput("weight string must have one 0/1 digit per coordinate");
  std::vector<int> mu;
  for (char c : parts[2]) {
    if (c != '0' && c != '1') throw InvalidInput("weights must be 0 or 1");
    mu.push_back(c - '0');
  }
  return make_group(kind, m, std::move(mu));
}

// "p=3,f=1,n=2"
WittRingPtr parse_ring(const std::string& text) {
  std::uint64_t p = 0;
  unsigned f = 1, n = 2;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos) throw InvalidInput("ring must look like p=3,f=1,n=2");
    std::string key = item.substr(0, eq);
    std::uint64_t val = std::stoull(item.substr(eq + 1));
    if (key == "p")
      p = val;
    else if (key == "f")
      f = static_cast<unsigned>(val);
    else if (key == "n")
      n = static_cast<unsigned>(val);
    else
      throw InvalidInput("unknown ring parameter: " + key);
  }
  if (p == 0) throw InvalidInput("ring needs p=<prime>");
  return make_witt_ring(p, f, n);
}

void write_output(const json& j, const std::string& out_path) {
  std::string text = j.dump(2);
  text.push_back('\n');
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  // written once, atomically: no partial files on error
  std::string tmp = out_path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw InvalidInput("cannot open output file " + out_path);
    os << text;
    if (!os.flush()) throw InvalidInput("cannot write output file " + out_path);
  }
  std::filesystem::rename(tmp, out_path);
}

json read_json_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InvalidInput("cannot open " + path);
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("malformed JSON in ") + path + ": " + e.what());
  }
  return j;
}

WittRingPtr residue_ring_for(std::uint64_t q) {
  for (std::uint64_t p = 2; p <= q; ++p) {
    if (!detail::is_prime_u64(p)) continue;
    std::uint64_t power = p;
    unsigned f = 1;
    while (power < q) {
      power *= p;
      ++f;
    }
    if (power == q) return make_witt_ring(p, f, 2);
  }
  throw InvalidInput("q must be a prime power");
}

int cmd_gen(const std::string& kind, const std::string& group,
            const std::string& ring_text, std::uint64_t seed,
            const std::string& out) {
  GroupSpecPtr spec = parse_group(group);
  WittRingPtr ring = parse_ring(ring_text);
  WittElem sample = WittElem::zero(ring, ring->n);
  DieudonneModule<WittElem> d = [&] {
    if (kind == "ordinary") return dm_standard(DmKind::Ordinary, spec, sample);
    if (kind == "supersingular")
      return dm_standard(DmKind::Supersingular, spec, sample);
    if (kind == "random") {
      ScalarSampler<WittElem> s{ring, ring->n};
      return dm_random(spec, s, seed);
    }
    throw InvalidInput("kind must be ordinary, supersingular or random");
  }();
  ValidationReport rep = dm_validate(d);
  if (!rep.ok) throw InternalError("generated module fails validation: " + rep.first());
  write_output(module_to_json(d), out);
  return kExitOk;
}

int cmd_invariant(const std::string& module_path, const std::string& route,
                  const std::string& table_path, std::uint64_t seed,
                  const std::string& out) {
  DieudonneModule<WittElem> d = module_from_json(read_json_file(module_path));
  ValidationReport rep = dm_validate(d);
  if (!rep.ok) throw InvalidInput("module fails validation: " + rep.first());

  json result;
  std::optional<ZipCoset<WittElem>> eta_coset, zeta_coset;
  if (route == "eta" || route == "both") {
    ZipInvariant<WittElem> inv = zip_invariant(trivialize(d, seed));
    result["integral"] = mat_to_json(inv.integral_part.mat());
    result["coset_rep"] = mat_to_json(canonical_rep(inv.coset).mat());
    eta_coset = inv.coset;
  }
  if (route == "zeta" || route == "both") {
    ZipCoset<WittElem> zc = zeta_invariant(d, seed);
    result["zeta_coset_rep"] = mat_to_json(canonical_rep(zc).mat());
    if (!result.contains("coset_rep")) result["coset_rep"] = result["zeta_coset_rep"];
    zeta_coset = zc;
  }
  if (route != "eta" && route != "zeta" && route != "both")
    throw InvalidInput("route must be eta, zeta or both");

  bool agree = true;
  if (eta_coset && zeta_coset) {
    agree = coset_equal(*eta_coset, *zeta_coset);
    result["routes_agree"] = agree;
  }

  if (!table_path.empty()) {
    json tj = read_json_file(table_path);
    GroupSpecPtr tspec = spec_from_json(tj.at("spec"));
    if (!tspec->same_as(*d.spec))
      throw InvalidInput("orbit table is for a different group");
    std::uint64_t q = tj.at("q").get<std::uint64_t>();
    if (q != d.frob.at(0, 0).ring()->q())
      throw InvalidInput("orbit table is for a different residue field");
    OrbitTable table = orbit_decompose(tspec, residue_ring_for(q));
    ZipCoset<WittElem> c = eta_coset ? *eta_coset : *zeta_coset;
    result["orbit_id"] = classify(table, c);
  }

  write_output(result, out);
  return agree ? kExitOk : kExitViolation;
}

int cmd_orbits(const std::string& group, std::uint64_t q, const std::string& out) {
  GroupSpecPtr spec = parse_group(group);
  OrbitTable table = orbit_decompose(spec, residue_ring_for(q));
  write_output(orbit_table_to_json(table), out);
  return kExitOk;
}

int cmd_classify(const std::string& table_path, const std::string& module_path,
                 std::uint64_t seed, const std::string& out) {
  json tj = read_json_file(table_path);
  GroupSpecPtr tspec = spec_from_json(tj.at("spec"));
  std::uint64_t q = tj.at("q").get<std::uint64_t>();
  OrbitTable table = orbit_decompose(tspec, residue_ring_for(q));

  DieudonneModule<WittElem> d = module_from_json(read_json_file(module_path));
  if (!d.spec->same_as(*tspec))
    throw InvalidInput("module and orbit table use different groups");
  ValidationReport rep = dm_validate(d);
  if (!rep.ok) throw InvalidInput("module fails validation: " + rep.first());
  ZipInvariant<WittElem> inv = zip_invariant(trivialize(d, seed));
  std::size_t id = classify(table, inv.coset);
  write_output(json{{"orbit_id", id},
                    {"orbit_size", table.orbits[id].size},
                    {"coset_rep", mat_to_json(canonical_rep(inv.coset).mat())}},
               out);
  return kExitOk;
}

struct LemmaResult {
  std::string name;
  unsigned trials = 0;
  unsigned failures = 0;
  std::string counterexample = {};
};

void print_results(const std::vector<LemmaResult>& results) {
  for (const auto& r : results) {
    std::cout << (r.failures == 0 ? "[PASS] " : "[FAIL] ") << r.name << ": "
              << (r.trials - r.failures) << "/" << r.trials << " trials ok\n";
    if (r.failures > 0 && !r.counterexample.empty())
      std::cout << "       counterexample: " << r.counterexample << "\n";
  }
}

int cmd_verify(const std::string& lemma, unsigned trials, std::uint64_t seed) {
  if (trials == 0) throw CLI::ValidationError("--trials must be positive");

  struct Config {
    std::uint64_t p;
    unsigned f, n;
    GroupKind kind;
    unsigned m;
    std::vector<int> mu;
  };
  const std::vector<Config> grid = {
      {2, 1, 2, GroupKind::GL, 2, {1, 0}},
      {3, 1, 2, GroupKind::GL, 3, {1, 1, 0}},
      {3, 1, 3, GroupKind::GSp, 4, {1, 1, 0, 0}},
      {2, 2, 2, GroupKind::GL, 2, {1, 0}},
      {5, 1, 2, GroupKind::GSp, 4, {1, 1, 0, 0}},
  };

  std::vector<LemmaResult> results;
  auto want = [&](const std::string& name) {
    return lemma == "all" || lemma == name;
  };

  if (want("integrality")) {
    LemmaResult r{"integrality (mu(p)-conjugation of P+)"};
    for (const auto& cfg : grid) {
      auto ring = make_witt_ring(cfg.p, cfg.f, cfg.n);
      auto spec = make_group(cfg.kind, cfg.m, cfg.mu);
      ScalarSampler<WittElem> s{ring, cfg.n};
      Rng rng = Rng::stream(seed, cfg.p * 1000 + cfg.m);
      for (unsigned k = 0; k < trials; ++k) {
        ++r.trials;
        auto h = random_p_plus(spec, s, rng);
        auto res = mu_p_conjugate(h);
        bool ok = res.integral;
        auto u = random_u_plus(spec, s, rng);
        auto resu = mu_p_conjugate(u);
        ok = ok && resu.integral && resu.congruent_to_1;
        if (!ok) {
          ++r.failures;
          if (r.counterexample.empty())
            r.counterexample =
                "p=" + std::to_string(cfg.p) + " trial " + std::to_string(k);
        }
      }
    }
    results.push_back(std::move(r));
  }

  if (want("gamma-iso")) {
    LemmaResult r{"gamma-iso (partially divided Frobenius invertible)"};
    for (const auto& cfg : grid) {
      auto ring = make_witt_ring(cfg.p, cfg.f, cfg.n);
      auto spec = make_group(cfg.kind, cfg.m, cfg.mu);
      ScalarSampler<WittElem> s{ring, cfg.n};
      for (unsigned k = 0; k < trials; ++k) {
        ++r.trials;
        auto d = dm_random(spec, s, splitmix64(seed ^ (k + 1)));
        try {
          auto gf = gamma_factorization(d, normal_decomposition(d));
          bool ok = is_unit(det(gf.gamma)) &&
                    gf.gamma * reduce_to_precision_mat(gf.f_part, cfg.n - 1) ==
                        reduce_to_precision_mat(d.frob, cfg.n - 1);
          if (!ok) throw ExactnessFailure("gamma f != F");
        } catch (const Error& e) {
          ++r.failures;
          if (r.counterexample.empty()) r.counterexample = e.what();
        }
      }
    }
    results.push_back(std::move(r));
  }

  auto run_property = [&](const std::string& name, VerifyProperty prop,
                          unsigned per_module) {
    LemmaResult r{name};
    for (const auto& cfg : grid) {
      auto ring = make_witt_ring(cfg.p, cfg.f, cfg.n);
      auto spec = make_group(cfg.kind, cfg.m, cfg.mu);
      ScalarSampler<WittElem> s{ring, cfg.n};
      unsigned modules = std::max(1u, trials / per_module);
      for (unsigned k = 0; k < modules; ++k) {
        auto d = dm_random(spec, s, splitmix64(seed * 31 + k));
        VerifyReport rep = verify(d, prop, per_module, splitmix64(seed + k));
        r.trials += rep.trials;
        r.failures += rep.failures;
        if (rep.failures > 0 && r.counterexample.empty())
          r.counterexample = rep.counterexample;
      }
    }
    results.push_back(std::move(r));
  };

  if (want("lift"))
    run_property("lift (independence of the chart lift)",
                 VerifyProperty::LiftIndependence, 10);
  if (want("frame"))
    run_property("frame (independence of the Frobenius lift on the frame)",
                 VerifyProperty::FrameIndependence, 5);
  if (want("equivariance"))
    run_property("equivariance (P+ moves match the coset action)",
                 VerifyProperty::Equivariance, 10);
  if (want("comparison"))
    run_property("comparison (integral route = F-zip route)",
                 VerifyProperty::Comparison, 10);

  if (results.empty())
    throw CLI::ValidationError(
        "--lemma must be one of integrality, gamma-iso, lift, frame, "
        "equivariance, comparison, all");

  print_results(results);
  for (const auto& r : results)
    if (r.failures > 0) return kExitViolation;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact zip/Ekedahl-Oort invariants of Dieudonne modules"};
  app.require_subcommand(1);

  std::string kind = "random", group = "GL:2:10", ring = "p=3,f=1,n=2";
  std::string module_path, table_path, out, route = "eta", lemma = "all";
  std::uint64_t seed = 0, q = 2;
  unsigned trials = 100;

  auto* gen = app.add_subcommand("gen", "generate a module file");
  gen->add_option("--kind", kind, "ordinary | supersingular | random");
  gen->add_option("--group", group, "group spec, e.g. GL:2:10 or GSp:4:1100");
  gen->add_option("--ring", ring, "base ring, e.g. p=3,f=1,n=2");
  gen->add_option("--seed", seed, "seed for random generation");
  gen->add_option("--out", out, "output path (default: stdout)");

  auto* inv = app.add_subcommand("invariant", "compute the zip invariant of a module");
  inv->add_option("--module", module_path, "module JSON file")->required();
  inv->add_option("--route", route, "eta | zeta | both");
  inv->add_option("--table", table_path, "orbit table JSON; adds orbit_id");
  inv->add_option("--seed", seed, "trivialization seed");
  inv->add_option("--out", out, "output path (default: stdout)");

  auto* orb_cmd = app.add_subcommand("orbits", "enumerate zip-group orbits on G(F_q)");
  orb_cmd->add_option("--group", group, "group spec, e.g. GSp:4:1100");
  orb_cmd->add_option("--q", q, "residue field size (prime power)")->required();
  orb_cmd->add_option("--out", out, "output path (default: stdout)");

  auto* cls = app.add_subcommand("classify", "orbit id of a module's invariant");
  cls->add_option("--table", table_path, "orbit table JSON")->required();
  cls->add_option("--module", module_path, "module JSON file")->required();
  cls->add_option("--seed", seed, "trivialization seed");
  cls->add_option("--out", out, "output path (default: stdout)");

  auto* ver = app.add_subcommand("verify", "run the brute-force verifier suites");
  ver->add_option("--lemma", lemma,
                  "integrality | gamma-iso | lift | frame | equivariance | "
                  "comparison | all");
  ver->add_option("--trials", trials, "trials per configuration");
  ver->add_option("--seed", seed, "master seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen->parsed()) return cmd_gen(kind, group, ring, seed, out);
    if (inv->parsed()) return cmd_invariant(module_path, route, table_path, seed, out);
    if (orb_cmd->parsed()) return cmd_orbits(group, q, out);
    if (cls->parsed()) return cmd_classify(table_path, module_path, seed, out);
    if (ver->parsed()) return cmd_verify(lemma, trials, seed);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const CapExceeded& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  return kExitUsage;
}
