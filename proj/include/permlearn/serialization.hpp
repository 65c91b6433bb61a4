#ifndef PERMLEARN_SERIALIZATION_HPP
#define PERMLEARN_SERIALIZATION_HPP

// JSON forms of the library types plus resumable checkpoints (nlohmann/json).

#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include "json.hpp"
#include "permlearn/affine.hpp"
#include "permlearn/config.hpp"
#include "permlearn/errors.hpp"
#include "permlearn/optimizer.hpp"
#include "permlearn/pair_set.hpp"
#include "permlearn/permutation.hpp"

namespace permlearn {

using json = nlohmann::json;

inline json to_json(const Permutation& p) { return json{{"size", p.size()}, {"map", p.map()}}; }

inline Permutation permutation_from_json(const json& j) {
  try {
    auto map = j.at("map").get<std::vector<Permutation::index_type>>();
    if (j.contains("size") && j.at("size").get<std::size_t>() != map.size())
      throw io_error("permutation json: size does not match map length");
    return Permutation::from_map(std::move(map));
  } catch (const json::exception& e) {
    throw io_error(std::string("permutation json: ") + e.what());
  } catch (const contract_error& e) {
    throw io_error(std::string("permutation json: ") + e.what());
  }
}

inline json to_json(const LearnConfig& c) {
  return json{{"L", c.L},
              {"m", c.m},
              {"l", c.l},
              {"S_size", c.set_size},
              {"P_size", c.pair_count},
              {"n_t", c.n_t},
              {"n_n", c.n_n},
              {"n_r", c.n_r},
              {"n_i", c.n_i},
              {"seed", c.seed},
              {"min_minority", c.min_minority},
              {"checkpoint_every", c.checkpoint_every},
              {"verify_every", c.verify_every}};
}

/// Keys missing from `j` keep their value in `base`; unknown keys are rejected.
inline LearnConfig config_from_json(const json& j, LearnConfig base = {}) {
  if (!j.is_object()) throw config_error("config must be a JSON object");
  static const std::set<std::string> known{"L",   "m",  "l",    "S_size",       "P_size",           "n_t",
                                           "n_n", "n_r", "n_i", "seed",         "min_minority",     "checkpoint_every",
                                           "verify_every"};
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) throw config_error("unknown config key: " + key);
  }
  auto read = [&](const char* key, auto& field) {
    if (!j.contains(key)) return;
    try {
      const auto& v = j.at(key);
      using T = std::decay_t<decltype(field)>;
      if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
          throw config_error(std::string("config key ") + key + " must be a nonnegative integer");
      } else if (!v.is_number()) {
        throw config_error(std::string("config key ") + key + " must be a number");
      }
      field = v.get<T>();
    } catch (const json::exception& e) {
      throw config_error(std::string("config key ") + key + ": " + e.what());
    }
  };
  read("L", base.L);
  read("m", base.m);
  read("l", base.l);
  read("S_size", base.set_size);
  read("P_size", base.pair_count);
  read("n_t", base.n_t);
  read("n_n", base.n_n);
  read("n_r", base.n_r);
  read("n_i", base.n_i);
  read("seed", base.seed);
  read("min_minority", base.min_minority);
  read("checkpoint_every", base.checkpoint_every);
  read("verify_every", base.verify_every);
  return base;
}

inline json to_json(const Provenance& p) { return json{{"mode", p.mode}, {"parents", p.parents}}; }

inline Provenance provenance_from_json(const json& j) {
  return Provenance{j.at("mode").get<std::string>(), j.value("parents", std::vector<std::string>{})};
}

inline json to_json(const std::vector<IterationRecord>& trace) {
  json out = json::array();
  for (const auto& r : trace) out.push_back(json::array({r.before_sweep, r.after_sweep, r.after_update, r.accepted}));
  return out;
}

inline std::vector<IterationRecord> trace_from_json(const json& j) {
  std::vector<IterationRecord> out;
  for (const auto& r : j) {
    out.push_back(IterationRecord{r.at(0).get<std::size_t>(), r.at(1).get<std::size_t>(),
                                  r.at(2).get<std::size_t>(), r.at(3).get<std::size_t>()});
  }
  return out;
}

/// {"size", "map", "final_objective", "config", "provenance", "trace"}; trace
/// rows are [before_sweep, after_sweep, after_update, accepted_swaps].
inline json to_json(const LearnedTransformation& lt) {
  return json{{"size", lt.t.size()},
              {"map", lt.t.map()},
              {"final_objective", lt.final_objective},
              {"config", to_json(lt.config)},
              {"provenance", to_json(lt.provenance)},
              {"trace", to_json(lt.trace)}};
}

inline LearnedTransformation learned_from_json(const json& j) {
  try {
    LearnedTransformation lt;
    lt.t = permutation_from_json(j);
    lt.final_objective = j.value("final_objective", std::size_t{0});
    if (j.contains("config")) lt.config = config_from_json(j.at("config"));
    if (j.contains("provenance")) lt.provenance = provenance_from_json(j.at("provenance"));
    if (j.contains("trace")) lt.trace = trace_from_json(j.at("trace"));
    return lt;
  } catch (const json::exception& e) {
    throw io_error(std::string("transformation json: ") + e.what());
  }
}

inline json to_json(const AffineFit& f) {
  return json{{"A", {{f.A[0][0], f.A[0][1]}, {f.A[1][0], f.A[1][1]}}},
              {"b", {f.b[0], f.b[1]}},
              {"s_x", f.s_x},
              {"s_y", f.s_y},
              {"lambda", f.lambda},
              {"theta", f.theta},
              {"det", f.det},
              {"residual_rms", f.residual_rms}};
}

/// Pair list snapshot: {"pairs": [[first, second, serial], ...], "next_serial"}.
inline json to_json(const PairSet& ps) {
  json pairs = json::array();
  for (const auto& p : ps.pairs()) pairs.push_back(json::array({p.first, p.second, p.serial}));
  return json{{"pairs", pairs}, {"next_serial", ps.next_serial()}};
}

inline void pairs_from_json(const json& j, PairSet& ps) {
  std::vector<ImagePair> pairs;
  for (const auto& p : j.at("pairs"))
    pairs.push_back(ImagePair{p.at(0).get<ImageId>(), p.at(1).get<ImageId>(), p.at(2).get<std::uint64_t>()});
  ps.assign(std::move(pairs), j.at("next_serial").get<std::uint64_t>());
}

/// Full state for resuming; `fingerprint` identifies the image set.
inline json checkpoint_json(const LearnState& s, std::uint64_t fingerprint) {
  return json{{"config", to_json(s.config)},
              {"permutation", to_json(s.t)},
              {"pair_set", to_json(s.ps)},
              {"iteration", s.iteration},
              {"objective", s.objective},
              {"trace", to_json(s.trace)},
              {"provenance", to_json(s.provenance)},
              {"rng", s.rng.save()},
              {"dataset_fingerprint", fingerprint}};
}

/// Rebuilds a state over `set`; throws data_error if the set's fingerprint
/// differs from the one recorded.
inline LearnState state_from_checkpoint(const json& j, const ImageSet& set) {
  try {
    if (j.at("dataset_fingerprint").get<std::uint64_t>() != set.fingerprint())
      throw data_error("checkpoint: dataset fingerprint mismatch");
    LearnState s(set);
    s.config = config_from_json(j.at("config"));
    s.t = permutation_from_json(j.at("permutation"));
    pairs_from_json(j.at("pair_set"), s.ps);
    s.iteration = j.at("iteration").get<std::size_t>();
    s.objective = j.at("objective").get<std::size_t>();
    s.trace = trace_from_json(j.at("trace"));
    s.provenance = provenance_from_json(j.at("provenance"));
    s.rng.restore(j.at("rng").get<std::string>());
    return s;
  } catch (const json::exception& e) {
    throw io_error(std::string("checkpoint json: ") + e.what());
  }
}

inline void save_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open for writing: " + path.string());
  out << j.dump(1) << '\n';
  if (!out) throw io_error("write failed: " + path.string());
}

inline json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open: " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw io_error("malformed json in " + path.string() + ": " + e.what());
  }
}

}  // namespace permlearn

#endif  // PERMLEARN_SERIALIZATION_HPP
