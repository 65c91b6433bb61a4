// permlearn command-line driver.
//
//   permlearn gen-triangles   --out DIR [--preset P] [--config F] [--seed S] [--count N]
//   permlearn ingest-patches  --input DIR --out DIR [--side L] [--min-minority F]
//   permlearn learn           --out DIR [--data DIR] [--init T.json ...] [--resume CKPT]
//   permlearn batch-learn     --out DIR [--data DIR] [--restarts R] [--workers W]
//   permlearn analyze         T.json ... --out FILE.csv [--sigma S]
//   permlearn render          T.json --out DIR [--pattern FILE ...]
//   permlearn bench-search    [--data DIR] [--count N] [--side L] [--queries Q]
//   permlearn oracle-recover  [--seeds K] [--out DIR]
//
// Every command writes manifest.json into its output directory. Errors go to
// stderr as {"error": <category>, "message": <text>} with a nonzero exit code.

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "permlearn/permlearn.hpp"
#include "png_input.hpp"

namespace fs = std::filesystem;
using namespace permlearn;

namespace {

class usage_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Clock = std::chrono::steady_clock;

// Collects the pieces of a RunManifest while a command runs.
class Manifest {
 public:
  explicit Manifest(std::string command) : command_(std::move(command)) {}

  void config(const LearnConfig& c) { config_ = to_json(c); }
  void fingerprint(std::uint64_t fp) { fingerprint_ = fp; }
  void output(const fs::path& p) { outputs_.push_back(p.string()); }
  void warn(const std::string& w) {
    spdlog::warn("{}", w);
    warnings_.push_back(w);
  }
  void set(const std::string& key, json value) { extra_[key] = std::move(value); }

  template <class F>
  auto phase(const std::string& name, F&& f) {
    const auto start = Clock::now();
    spdlog::debug("phase {} started", name);
    struct Record {
      Manifest& m;
      const std::string& name;
      Clock::time_point start;
      ~Record() { m.timings_[name] = std::chrono::duration<double>(Clock::now() - start).count(); }
    } record{*this, name, start};
    return f();
  }

  void write(const fs::path& dir) {
    const fs::path path = dir / "manifest.json";
    json j{{"command", command_},
           {"outputs", outputs_},
           {"timings_seconds", timings_},
           {"warnings", warnings_}};
    if (!config_.is_null()) j["config"] = config_;
    if (fingerprint_) j["dataset_fingerprint"] = *fingerprint_;
    for (const auto& [k, v] : extra_.items()) j[k] = v;
    j["outputs"].push_back(path.string());
    for (const auto& o : outputs_)
      if (!fs::exists(o)) throw io_error("declared output missing: " + o);
    save_json(path, j);
  }

 private:
  std::string command_;
  json config_;
  std::optional<std::uint64_t> fingerprint_;
  std::vector<std::string> outputs_;
  std::map<std::string, double> timings_;
  std::vector<std::string> warnings_;
  json extra_ = json::object();
};

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw io_error("cannot create output directory " + dir.string());
}

void configure_logging() {
  auto logger = spdlog::stderr_color_mt("permlearn");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%H:%M:%S.%e] [%l] %v");
  const char* env = std::getenv("PERMLEARN_LOG");
  spdlog::set_level(env ? spdlog::level::from_str(env) : spdlog::level::info);
}

// The --config file overrides the preset; --seed overrides both.
struct ConfigOptions {
  std::string preset = "desk";
  std::string config_path;
  std::optional<std::uint64_t> seed;

  void attach(CLI::App* cmd) {
    cmd->add_option("--preset", preset, "Parameter preset")
        ->check(CLI::IsMember({"paper-triangles", "paper-patches", "desk"}));
    cmd->add_option("--config", config_path, "JSON config with flat keys (L, m, l, S_size, P_size, n_t, ...)");
    cmd->add_option("--seed", seed, "Run seed");
  }

  LearnConfig resolve() const {
    LearnConfig c = presets::by_name(preset);
    if (!config_path.empty()) c = config_from_json(load_json(config_path), c);
    if (seed) c.seed = *seed;
    return c;
  }
};

bool has_image_extension(const fs::path& p) {
  static const std::vector<std::string> exts{".pbm", ".pgm", ".ppm", ".pnm", ".png"};
  std::string e = p.extension().string();
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char ch) { return char(std::tolower(ch)); });
  return std::find(exts.begin(), exts.end(), e) != exts.end();
}

std::vector<fs::path> list_images(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw io_error("not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && has_image_extension(entry.path())) files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  return files;
}

GrayImage load_any_gray(const fs::path& p) {
  std::string e = p.extension().string();
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char ch) { return char(std::tolower(ch)); });
  return e == ".png" ? tools::load_png_gray(p) : pnm::load_gray(p);
}

// A dataset directory holds dataset.json (listing image files in order) and
// the P4 images themselves. A directory without dataset.json is read as all
// bitmap files in name order.
ImageSet load_dataset(const fs::path& dir, double min_minority) {
  std::vector<fs::path> files;
  const fs::path index = dir / "dataset.json";
  if (fs::exists(index)) {
    const json j = load_json(index);
    for (const auto& rec : j.at("images")) files.push_back(dir / rec.at("file").get<std::string>());
  } else {
    files = list_images(dir);
  }
  if (files.empty()) throw data_error("dataset " + dir.string() + " contains no images");
  ImageSet set(0, 0.0);
  std::size_t rejected = 0;
  for (const auto& f : files) {
    BitImage img = pnm::load_pbm(f);
    if (img.minority_fraction() < min_minority) {
      ++rejected;
      continue;
    }
    if (!set.empty() && img.side() != set.side()) throw data_error("dataset images differ in side: " + f.string());
    set.add(std::move(img));
  }
  if (rejected) spdlog::info("{} images below the minority filter were skipped", rejected);
  if (set.empty()) throw data_error("no dataset image passes the minority filter");
  spdlog::info("loaded {} images of side {} from {}", set.size(), set.side(), dir.string());
  return set;
}

// Either loads --data or generates triangles from the config.
ImageSet obtain_images(const std::string& data_dir, LearnConfig& c, Manifest& manifest) {
  ImageSet set;
  if (data_dir.empty()) {
    Rng data_rng(mix_seed(c.seed, 2));
    TriangleStats stats;
    set = manifest.phase("generate", [&] { return generate_triangles(c.L, c.set_size, c.min_minority, data_rng, &stats); });
    manifest.set("triangle_acceptance_rate", stats.acceptance_rate());
    spdlog::info("generated {} triangles (acceptance rate {:.3f})", set.size(), stats.acceptance_rate());
  } else {
    set = manifest.phase("load", [&] { return load_dataset(data_dir, c.min_minority); });
    manifest.set("data", data_dir);
    if (set.side() != c.L) {
      manifest.warn("dataset side " + std::to_string(set.side()) + " overrides config L=" + std::to_string(c.L));
      c.L = set.side();
    }
    if (set.size() != c.set_size) {
      manifest.warn("dataset size " + std::to_string(set.size()) + " overrides config S_size=" +
                    std::to_string(c.set_size));
      c.set_size = set.size();
    }
  }
  manifest.fingerprint(set.fingerprint());
  return set;
}

void check_and_warn(const LearnConfig& c, Manifest& manifest) {
  check_config(c);
  for (const auto& w : validate_config(c)) manifest.warn(w);
}

std::vector<Permutation> load_parents(const std::vector<std::string>& paths, std::size_t pixels) {
  std::vector<Permutation> parents;
  for (const auto& p : paths) {
    const json j = load_json(p);
    Permutation t = permutation_from_json(j.contains("map") ? j : j.at("permutation"));
    if (t.size() != pixels) throw data_error("init transformation " + p + " has the wrong size");
    parents.push_back(std::move(t));
  }
  return parents;
}

json fit_summary(const AffineFit& f) {
  json j = to_json(f);
  j["poor"] = is_poor(f);
  return j;
}

// ---------------------------------------------------------------- commands

struct GenTrianglesCmd {
  ConfigOptions cfg;
  std::string out;
  std::optional<std::size_t> count, side;
  std::optional<double> min_minority;

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("gen-triangles", "Generate the synthetic triangle set as P4 files");
    cfg.attach(cmd);
    cmd->add_option("--out", out, "Output directory")->required();
    cmd->add_option("--count", count, "Number of images (default S_size)");
    cmd->add_option("--side", side, "Image side (default L)");
    cmd->add_option("--min-minority", min_minority, "Minority pixel fraction filter");
    cmd->callback([this] { run(); });
  }

  void run() {
    LearnConfig c = cfg.resolve();
    if (count) c.set_size = *count;
    if (side) c.L = *side;
    if (min_minority) c.min_minority = *min_minority;
    check_config(c);
    Manifest manifest("gen-triangles");
    manifest.config(c);
    ensure_dir(fs::path(out) / "images");
    Rng rng(mix_seed(c.seed, 2));
    TriangleStats stats;
    const ImageSet set =
        manifest.phase("generate", [&] { return generate_triangles(c.L, c.set_size, c.min_minority, rng, &stats); });
    json records = json::array();
    manifest.phase("write", [&] {
      for (ImageId id = 0; id < set.size(); ++id) {
        char name[32];
        std::snprintf(name, sizeof name, "images/tri_%06u.pgm", unsigned(id));
        pnm::save_pbm(fs::path(out) / name, set[id]);
        records.push_back({{"file", name}, {"minority_fraction", set[id].minority_fraction()}});
      }
      return 0;
    });
    const fs::path index = fs::path(out) / "dataset.json";
    save_json(index, json{{"kind", "triangles"},
                          {"side", c.L},
                          {"count", set.size()},
                          {"seed", c.seed},
                          {"min_minority", c.min_minority},
                          {"attempts", stats.attempts},
                          {"acceptance_rate", stats.acceptance_rate()},
                          {"fingerprint", set.fingerprint()},
                          {"images", records}});
    manifest.output(index);
    manifest.fingerprint(set.fingerprint());
    manifest.set("acceptance_rate", stats.acceptance_rate());
    manifest.write(out);
    std::cout << "generated " << set.size() << " triangles, acceptance rate " << stats.acceptance_rate() << "\n";
  }
};

struct IngestPatchesCmd {
  std::string input, out;
  std::size_t side = 64;
  double min_minority = 0.10;

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("ingest-patches", "Binarize a directory of images and cut L x L patches");
    cmd->add_option("--input", input, "Directory of PNG/PNM images")->required();
    cmd->add_option("--out", out, "Output directory")->required();
    cmd->add_option("--side", side, "Patch side");
    cmd->add_option("--min-minority", min_minority, "Minority pixel fraction filter");
    cmd->callback([this] { run(); });
  }

  void run() {
    if (side < 1) throw usage_error("--side must be at least 1");
    if (!(min_minority >= 0 && min_minority < 0.5)) throw usage_error("--min-minority must lie in [0, 0.5)");
    Manifest manifest("ingest-patches");
    ensure_dir(fs::path(out) / "images");
    const auto sources = list_images(input);
    if (sources.empty()) throw data_error("no images in " + input);
    json records = json::array();
    ImageSet set(side, min_minority);
    std::size_t skipped = 0;
    manifest.phase("ingest", [&] {
      for (const auto& src : sources) {
        GrayImage gray;
        try {
          gray = load_any_gray(src);
        } catch (const io_error& e) {
          manifest.warn(std::string("skipping unreadable image: ") + e.what());
          ++skipped;
          continue;
        }
        const Binarization b = binarize(gray);
        for (auto& patch : extract_patches(b.raster, side, min_minority)) {
          char name[32];
          std::snprintf(name, sizeof name, "images/patch_%07zu.pgm", set.size());
          pnm::save_pbm(fs::path(out) / name, patch.image);
          records.push_back({{"file", name},
                             {"source", src.filename().string()},
                             {"offset", {patch.u, patch.v}},
                             {"minority_fraction", patch.minority_fraction},
                             {"threshold", b.threshold}});
          set.add(std::move(patch.image));
        }
      }
      return 0;
    });
    const fs::path index = fs::path(out) / "dataset.json";
    save_json(index, json{{"kind", "patches"},
                          {"side", side},
                          {"count", set.size()},
                          {"min_minority", min_minority},
                          {"sources", sources.size()},
                          {"fingerprint", set.fingerprint()},
                          {"images", records}});
    manifest.output(index);
    manifest.fingerprint(set.fingerprint());
    manifest.set("skipped_sources", skipped);
    manifest.write(out);
    std::cout << "ingested " << set.size() << " patches from " << sources.size() - skipped << " images\n";
  }
};

struct LearnCmd {
  ConfigOptions cfg;
  std::string out, data, resume;
  std::vector<std::string> init;

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("learn", "Learn one transformation");
    cfg.attach(cmd);
    cmd->add_option("--out", out, "Output directory")->required();
    cmd->add_option("--data", data, "Dataset directory (default: generate triangles from the config)");
    cmd->add_option("--init", init, "Initial transformation(s); two or more are composed");
    cmd->add_option("--resume", resume, "Checkpoint to resume from");
    cmd->callback([this] { run(); });
  }

  void run() {
    Manifest manifest("learn");
    LearnConfig c = cfg.resolve();
    std::optional<json> checkpoint;
    if (!resume.empty()) {
      checkpoint = load_json(resume);
      c = config_from_json(checkpoint->at("config"));
      manifest.set("resumed_from", resume);
    }
    check_config(c);
    ensure_dir(out);
    const ImageSet set = obtain_images(data, c, manifest);
    check_and_warn(c, manifest);
    manifest.config(c);

    const MatchIndex index = manifest.phase("index", [&] { return build_index(c, set); });
    std::optional<LearnState> state;
    if (checkpoint) {
      state.emplace(state_from_checkpoint(*checkpoint, set));
      spdlog::info("resuming at iteration {} with D_T = {}", state->iteration, state->objective);
    } else {
      std::optional<Permutation> t0;
      Provenance prov{"random", {}};
      if (!init.empty()) {
        auto parents = load_parents(init, c.pixel_count());
        Rng init_rng(mix_seed(c.seed, 3));
        t0 = parents.size() == 1 ? parents.front() : compose_init(parents, init_rng);
        prov = Provenance{parents.size() == 1 ? "init" : "composed", init};
      }
      state.emplace(manifest.phase("init", [&] { return init_state(c, set, index, std::move(t0), prov); }));
    }

    const fs::path ckpt_path = fs::path(out) / "checkpoint.json";
    const std::uint64_t fp = set.fingerprint();
    const std::size_t log_every = std::max<std::size_t>(1, c.n_i / 20);
    bool wrote_checkpoint = false;
    manifest.phase("minimize", [&] {
      permlearn::run(*state, index, [&](const LearnState& s) {
        if (s.iteration % log_every == 0) spdlog::info("iteration {}/{}: D_T = {}", s.iteration, c.n_i, s.objective);
        if (c.checkpoint_every && s.iteration % c.checkpoint_every == 0) {
          save_json(ckpt_path, checkpoint_json(s, fp));
          wrote_checkpoint = true;
        }
      });
      return 0;
    });
    if (wrote_checkpoint) manifest.output(ckpt_path);

    const LearnedTransformation lt = finish(*state);
    const fs::path t_path = fs::path(out) / "transformation.json";
    save_json(t_path, to_json(lt));
    manifest.output(t_path);
    const AffineFit fit = fit_affine(lt.t, c.L, 0.1 * double(c.L));
    manifest.set("final_objective", lt.final_objective);
    manifest.set("affine_fit", fit_summary(fit));
    manifest.write(out);
    std::cout << "final D_T " << lt.final_objective << ", det " << fit.det << ", residual_rms " << fit.residual_rms
              << "\n";
  }
};

struct BatchLearnCmd {
  ConfigOptions cfg;
  std::string out, data;
  std::size_t restarts = 8;
  std::size_t workers = std::max(1u, std::thread::hardware_concurrency());

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("batch-learn", "Learn R restarts, keep the best half by final D_T");
    cfg.attach(cmd);
    cmd->add_option("--out", out, "Output directory")->required();
    cmd->add_option("--data", data, "Dataset directory (default: generate triangles from the config)");
    cmd->add_option("--restarts", restarts, "Number of restarts R")->check(CLI::PositiveNumber);
    cmd->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
    cmd->callback([this] { run(); });
  }

  void run() {
    Manifest manifest("batch-learn");
    LearnConfig c = cfg.resolve();
    check_config(c);
    ensure_dir(out);
    const ImageSet set = obtain_images(data, c, manifest);
    check_and_warn(c, manifest);
    manifest.config(c);
    const MatchIndex index = manifest.phase("index", [&] { return build_index(c, set); });

    std::vector<std::optional<LearnedTransformation>> results(restarts);
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    manifest.phase("minimize", [&] {
      auto worker = [&] {
        for (std::size_t r = next++; r < restarts; r = next++) {
          try {
            LearnConfig rc = c;
            rc.seed = mix_seed(c.seed, 100 + r);
            results[r] = minimize(rc, set, index, std::nullopt, Provenance{"random", {}});
            spdlog::info("restart {} finished: D_T = {}", r, results[r]->final_objective);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
          }
        }
      };
      std::vector<std::thread> pool;
      for (std::size_t w = 0; w < std::min(workers, restarts); ++w) pool.emplace_back(worker);
      for (auto& th : pool) th.join();
      return 0;
    });
    if (error) std::rethrow_exception(error);

    std::vector<std::size_t> order(restarts);
    for (std::size_t r = 0; r < restarts; ++r) order[r] = r;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return results[a]->final_objective < results[b]->final_objective; });
    const std::size_t keep = (restarts + 1) / 2;
    json summary = json::array();
    std::size_t poor = 0;
    for (std::size_t rank = 0; rank < restarts; ++rank) {
      const std::size_t r = order[rank];
      char name[32];
      std::snprintf(name, sizeof name, "restart_%03zu.json", r);
      const fs::path p = fs::path(out) / name;
      save_json(p, to_json(*results[r]));
      manifest.output(p);
      const AffineFit fit = fit_affine(results[r]->t, c.L, 0.1 * double(c.L));
      poor += is_poor(fit);
      summary.push_back({{"restart", r},
                         {"file", name},
                         {"seed", results[r]->config.seed},
                         {"final_objective", results[r]->final_objective},
                         {"kept", rank < keep},
                         {"fit", fit_summary(fit)}});
    }
    const fs::path batch = fs::path(out) / "batch.json";
    save_json(batch, json{{"restarts", restarts}, {"kept", keep}, {"poor", poor}, {"ranking", summary}});
    manifest.output(batch);
    manifest.write(out);
    std::cout << "kept " << keep << " of " << restarts << " restarts; " << poor << " flagged poor\n";
  }
};

struct AnalyzeCmd {
  std::vector<std::string> inputs;
  std::string out = "analysis.csv";
  std::optional<double> sigma;
  std::string weighting = "source";

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("analyze", "Fit and decompose affine maps of learned transformations");
    cmd->add_option("transformations", inputs, "Transformation JSON files")->required();
    cmd->add_option("--out", out, "CSV output path");
    cmd->add_option("--sigma", sigma, "Gaussian weight standard deviation in pixels (default 0.1 L)");
    cmd->add_option("--weighting", weighting, "Which endpoint carries the weight")
        ->check(CLI::IsMember({"source", "destination", "both"}));
    cmd->callback([this] { run(); });
  }

  void run() {
    Manifest manifest("analyze");
    const Weighting w = weighting == "source" ? Weighting::source
                        : weighting == "destination" ? Weighting::destination
                                                     : Weighting::both;
    const fs::path csv_path = out;
    if (csv_path.has_parent_path()) ensure_dir(csv_path.parent_path());
    std::ofstream csv(csv_path);
    if (!csv) throw io_error("cannot open for writing: " + csv_path.string());
    csv.precision(10);
    csv << "file,s_x,s_y,lambda,theta,det,b_x,b_y,residual_rms,poor\n";
    std::size_t poor = 0;
    manifest.phase("fit", [&] {
      for (const auto& in : inputs) {
        const LearnedTransformation lt = learned_from_json(load_json(in));
        const auto side = std::size_t(std::llround(std::sqrt(double(lt.t.size()))));
        if (side * side != lt.t.size()) throw data_error(in + ": permutation size is not a square");
        const AffineFit f = fit_affine(lt.t, side, sigma.value_or(0.1 * double(side)), w);
        poor += is_poor(f);
        csv << in << ',' << f.s_x << ',' << f.s_y << ',' << f.lambda << ',' << f.theta << ',' << f.det << ','
            << f.b[0] << ',' << f.b[1] << ',' << f.residual_rms << ',' << (is_poor(f) ? 1 : 0) << '\n';
      }
      return 0;
    });
    csv.close();
    if (!csv) throw io_error("write failed: " + csv_path.string());
    manifest.output(csv_path);
    manifest.set("poor", poor);
    manifest.write(csv_path.has_parent_path() ? csv_path.parent_path() : fs::path("."));
    std::cout << "analyzed " << inputs.size() << " transformations, " << poor << " poor\n";
  }
};

struct RenderCmd {
  std::string input, out, id;
  std::vector<std::string> pattern_files;
  std::vector<std::size_t> checks;

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("render", "Apply a transformation to checkerboards and images");
    cmd->add_option("transformation", input, "Transformation JSON")->required();
    cmd->add_option("--out", out, "Output directory")->required();
    cmd->add_option("--id", id, "File name prefix (default: input stem)");
    cmd->add_option("--pattern", pattern_files, "Extra L x L PGM/PBM pattern files");
    cmd->add_option("--checks", checks, "Checkerboard sizes (default 32 16 8 4 2)");
    cmd->callback([this] { run(); });
  }

  void run() {
    Manifest manifest("render");
    const LearnedTransformation lt = learned_from_json(load_json(input));
    const auto side = std::size_t(std::llround(std::sqrt(double(lt.t.size()))));
    if (side * side != lt.t.size()) throw data_error(input + ": permutation size is not a square");
    std::vector<PatternSpec> patterns;
    if (checks.empty()) {
      patterns = standard_patterns(side);
    } else {
      for (std::size_t c : checks) {
        if (c < 1 || c > side) throw usage_error("--checks values must lie in [1, L]");
        patterns.push_back(PatternSpec::checks(c));
      }
    }
    for (const auto& f : pattern_files) patterns.push_back(PatternSpec::file(f));
    const std::string prefix = id.empty() ? fs::path(input).stem().string() : id;
    ensure_dir(out);
    const auto files = manifest.phase("render", [&] { return render_transform(lt.t, patterns, out, prefix); });
    for (const auto& f : files) manifest.output(f);
    const fs::path csv = fs::path(out) / (prefix + "_displacement.csv");
    write_displacement_csv(csv, lt.t, side);
    manifest.output(csv);
    manifest.write(out);
    std::cout << "wrote " << files.size() + 1 << " files to " << out << "\n";
  }
};

struct BenchSearchCmd {
  std::string data, out;
  std::size_t count = 10000, side = 32, queries = 1000, m = 5, l = 10;
  std::uint64_t seed = 1;

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("bench-search", "Measure close-match search cost and recall");
    cmd->add_option("--data", data, "Dataset directory (default: generate triangles)");
    cmd->add_option("--count", count, "Generated set size")->check(CLI::PositiveNumber);
    cmd->add_option("--side", side, "Generated image side")->check(CLI::PositiveNumber);
    cmd->add_option("--queries", queries, "Number of queries")->check(CLI::PositiveNumber);
    cmd->add_option("-m,--leaf-capacity", m, "Leaf capacity")->check(CLI::PositiveNumber);
    cmd->add_option("-l,--trees", l, "Number of trees")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", seed, "Seed");
    cmd->add_option("--out", out, "Output directory for bench.json and manifest.json");
    cmd->callback([this] { run(); });
  }

  void run() {
    Manifest manifest("bench-search");
    Rng rng(seed);
    const ImageSet set = data.empty() ? manifest.phase("generate", [&] { return generate_triangles(side, count, 0.10, rng); })
                                      : manifest.phase("load", [&] { return load_dataset(data, 0.0); });
    manifest.fingerprint(set.fingerprint());
    const MatchIndex index = manifest.phase("index", [&] { return MatchIndex(set, l, m, rng); });
    std::vector<BitImage> qs;
    for (std::size_t k = 0; k < queries; ++k) {
      BitImage q = set[ImageId(rng.below(set.size()))];
      for (int f = 0; f < 8; ++f) q.bits().flip(rng.below(q.pixel_count()));
      qs.push_back(std::move(q));
    }
    std::vector<MatchResult> approx, exact;
    const auto t0 = Clock::now();
    for (const auto& q : qs) approx.push_back(index.query(q));
    const double t_approx = std::chrono::duration<double>(Clock::now() - t0).count();
    const auto t1 = Clock::now();
    for (const auto& q : qs) exact.push_back(exact_nearest(set, q));
    const double t_exact = std::chrono::duration<double>(Clock::now() - t1).count();
    std::size_t hits = 0, examined = 0;
    for (std::size_t k = 0; k < qs.size(); ++k) {
      hits += approx[k].distance == exact[k].distance;
      examined += approx[k].examined;
    }
    const double mean_examined = double(examined) / double(qs.size());
    const json result{{"set_size", set.size()},
                      {"side", set.side()},
                      {"m", m},
                      {"l", l},
                      {"queries", qs.size()},
                      {"mean_examined", mean_examined},
                      {"candidate_speedup", double(set.size()) / mean_examined},
                      {"nominal_speedup", double(set.size()) / double(m * l)},
                      {"recall", double(hits) / double(qs.size())},
                      {"approx_seconds", t_approx},
                      {"exact_seconds", t_exact},
                      {"wall_speedup", t_exact / std::max(t_approx, 1e-12)}};
    std::cout << result.dump(2) << "\n";
    if (!out.empty()) {
      ensure_dir(out);
      const fs::path p = fs::path(out) / "bench.json";
      save_json(p, result);
      manifest.output(p);
      manifest.write(out);
    }
  }
};

struct OracleRecoverCmd {
  ConfigOptions cfg;
  std::string out;
  std::size_t seeds = 3, base_images = 2000;

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("oracle-recover", "Recover a planted 90 degree rotation and score it");
    cfg.attach(cmd);
    cmd->add_option("--seeds", seeds, "Number of run seeds")->check(CLI::PositiveNumber);
    cmd->add_option("--images", base_images, "Triangles before adding rotated copies")->check(CLI::PositiveNumber);
    cmd->add_option("--out", out, "Output directory");
    cmd->callback([this] { run(); });
  }

  void run() {
    Manifest manifest("oracle-recover");
    LearnConfig c = cfg.resolve();
    const std::size_t L = c.L;
    std::vector<Permutation::index_type> map(L * L);
    for (std::size_t v = 0; v < L; ++v)
      for (std::size_t u = 0; u < L; ++u) map[v * L + u] = Permutation::index_type((L - 1 - u) * L + v);
    const Permutation g = Permutation::from_map(std::move(map));

    Rng data_rng(mix_seed(c.seed, 2));
    const ImageSet base = generate_triangles(L, base_images, c.min_minority, data_rng);
    std::vector<BitImage> all;
    for (const auto& x : base) {
      all.push_back(x);
      all.emplace_back(L, permute(x.bits(), g));
    }
    for (std::size_t i = all.size() - 1; i > 0; --i) std::swap(all[i], all[data_rng.below(i + 1)]);
    ImageSet set(L, c.min_minority);
    for (auto& x : all) set.add(std::move(x));
    c.set_size = set.size();
    check_and_warn(c, manifest);
    manifest.config(c);
    manifest.fingerprint(set.fingerprint());

    const double centre = double(L) / 2.0, radius = 0.3 * double(L);
    json runs = json::array();
    double best = 0.0;
    for (std::size_t k = 0; k < seeds; ++k) {
      LearnConfig rc = c;
      rc.seed = c.seed + k;
      const auto lt = manifest.phase("seed_" + std::to_string(rc.seed), [&] { return minimize(rc, set); });
      std::size_t inside = 0, agree = 0;
      for (std::size_t i = 0; i < L * L; ++i) {
        const double du = double(i % L) + 0.5 - centre, dv = double(i / L) + 0.5 - centre;
        if (du * du + dv * dv > radius * radius) continue;
        ++inside;
        agree += lt.t[i] == g[i];
      }
      const double frac = double(agree) / double(inside);
      best = std::max(best, frac);
      const AffineFit fit = fit_affine(lt.t, L, 0.1 * double(L));
      std::cout << "seed " << rc.seed << ": match fraction " << frac << ", final D_T " << lt.final_objective
                << ", det " << fit.det << "\n";
      runs.push_back({{"seed", rc.seed}, {"match_fraction", frac}, {"final_objective", lt.final_objective},
                      {"fit", fit_summary(fit)}});
    }
    std::cout << "best match fraction " << best << "\n";
    if (!out.empty()) {
      ensure_dir(out);
      const fs::path p = fs::path(out) / "oracle.json";
      save_json(p, json{{"runs", runs}, {"best_match_fraction", best}});
      manifest.output(p);
      manifest.write(out);
    }
  }
};

int report_error(const std::string& category, const std::string& message, int code) {
  std::cerr << json{{"error", category}, {"message", message}}.dump() << std::endl;
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();
  CLI::App app{"Learn pixel permutations from image pairs"};
  app.require_subcommand(1);
  GenTrianglesCmd gen;
  IngestPatchesCmd ingest;
  LearnCmd learn;
  BatchLearnCmd batch;
  AnalyzeCmd analyze;
  RenderCmd render;
  BenchSearchCmd bench;
  OracleRecoverCmd oracle;
  gen.attach(app);
  ingest.attach(app);
  learn.attach(app);
  batch.attach(app);
  analyze.attach(app);
  render.attach(app);
  bench.attach(app);
  oracle.attach(app);
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("usage", e.what(), 2);
  } catch (const usage_error& e) {
    return report_error("usage", e.what(), 2);
  } catch (const config_error& e) {
    return report_error("config", e.what(), 2);
  } catch (const data_error& e) {
    return report_error("data", e.what(), 3);
  } catch (const io_error& e) {
    return report_error("io", e.what(), 4);
  } catch (const consistency_error& e) {
    return report_error("consistency", e.what(), 5);
  } catch (const std::exception& e) {
    return report_error("internal", e.what(), 1);
  }
  return 0;
}
