#include "ecn/cli.hpp"

#include <algorithm>
#include <chrono>
#include <iomanip>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ecn/distance.hpp"
#include "ecn/eval.hpp"
#include "ecn/io.hpp"
#include "ecn/rerank.hpp"
#include "ecn/synth.hpp"

namespace ecn::cli {
namespace {

constexpr const char* kExitCodes = R"(Exit codes:
  0  success                 2  usage error
  10 EmptyMatrix             11 ShapeMismatch          12 NonFinite
  13 ZeroNormRow             14 InvalidDistance        20 InvalidParams
  21 ParamsTooLarge          22 DegenerateSimilarity   23 IndexOutOfRange
  30 NoValidQueries          40 BadMagic               41 UnsupportedVersion
  42 TruncatedFile           43 DuplicateIndex         44 UnknownRole
  45 IndexGap                46 ParseError             47 IoError
  50 BadParams               51 TooLargeForOracle      1  other failure)";

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct DistanceArgs {
  std::string features, metric = "sqeuclidean", out;
};

struct RerankArgs {
  std::string features, distances, meta, method = "ecn-rank", out;
  EcnParams params;
};

struct EvalArgs {
  std::string distances, meta, out;
  std::vector<std::size_t> ranks{1, 5, 10, 50};
  std::vector<std::int64_t> distractors{-1, 0};
};

struct SynthArgs {
  synth::ClusterSpec spec;
  std::string out_prefix;
};

struct BenchArgs {
  BenchOptions options;
  std::string method = "ecn-rank", out;
};

void cmd_distance(const DistanceArgs& a, std::ostream& out) {
  const auto start = Clock::now();
  const FeatureMatrix features = io::read_features(a.features);
  const DistanceMatrix d =
      a.metric == "cosine" ? pairwise_cosine(features) : pairwise_sq_euclidean(features);
  io::write_distance(d, a.out);
  out << "distance: " << d.rows << "x" << d.cols << " " << a.metric << " matrix -> " << a.out
      << " (" << std::fixed << std::setprecision(3) << seconds_since(start) << " s)\n";
}

void cmd_rerank(RerankArgs a, std::ostream& out) {
  const auto start = Clock::now();
  a.params.method = parse_method(a.method);
  const EvalRecords records = io::read_metadata(a.meta);
  DistanceMatrix result;
  if (!a.features.empty()) {
    const FeatureMatrix features = io::read_features(a.features);
    if (features.n_items != records.size()) {
      throw Error(ErrorCode::ShapeMismatch, std::to_string(features.n_items) + " feature rows but " +
                                                std::to_string(records.size()) + " metadata records");
    }
    result = rerank(features, a.params, records);
  } else {
    const DistanceMatrix d = io::read_distance(a.distances);
    if (d.rows != records.size()) {
      throw Error(ErrorCode::ShapeMismatch, std::to_string(d.rows) + " distance rows but " +
                                                std::to_string(records.size()) + " metadata records");
    }
    result = rerank(d, a.params, records);
  }
  io::write_distance(result, a.out);
  out << "rerank: method=" << to_string(a.params.method) << " t=" << a.params.t
      << " q=" << a.params.q << " k=" << a.params.k << ", " << result.rows << " queries x "
      << result.cols << " gallery -> " << a.out << " (" << std::fixed << std::setprecision(3)
      << seconds_since(start) << " s)\n";
}

void cmd_eval(const EvalArgs& a, std::ostream& out) {
  const EvalRecords records = io::read_metadata(a.meta);
  const DistanceMatrix d = io::read_distance(a.distances);
  EvalOptions options;
  options.ranks = a.ranks;
  options.distractor_ids = a.distractors;
  const EvalReport report = evaluate(d, records, options);
  const nlohmann::json params = {{"ranks", a.ranks}, {"distractor_ids", a.distractors}};
  if (!a.out.empty()) io::write_report(report, params, a.out);

  out << std::fixed << std::setprecision(2) << "mAP " << 100.0 * report.map;
  for (const auto& [k, v] : report.cmc) out << "  R-" << k << " " << 100.0 * v;
  out << "  (" << report.num_queries << " queries, " << report.skipped_queries << " skipped)\n";
}

void cmd_synth(const SynthArgs& a, std::ostream& out) {
  const auto data = synth::generate_clusters(a.spec);
  const std::string features = a.out_prefix + ".ecnf";
  const std::string meta = a.out_prefix + ".meta.csv";
  io::write_features(data.features, features);
  io::write_metadata(data.records, meta);
  out << "synth: " << data.features.n_items << " items (" << a.spec.n_ids << " ids x "
      << a.spec.imgs_per_id << " imgs, dim " << a.spec.dim << ") -> " << features << ", " << meta
      << "\n";
}

void cmd_bench(BenchArgs a, std::ostream& out) {
  a.options.method = parse_method(a.method);
  const auto rows = run_bench(a.options);
  out << "method " << to_string(a.options.method) << ", best of " << a.options.runs
      << " run(s), " << num_threads() << " thread(s)\n";
  out << std::setw(10) << "n_items" << std::setw(12) << "seconds" << std::setw(12) << "median"
      << std::setw(10) << "ratio" << "\n";
  nlohmann::json table = nlohmann::json::array();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out << std::setw(10) << rows[i].n_items << std::setw(12) << std::fixed << std::setprecision(3)
        << rows[i].seconds << std::setw(12) << rows[i].median_seconds;
    nlohmann::json row = {{"n_items", rows[i].n_items},
                          {"seconds", rows[i].seconds},
                          {"median_seconds", rows[i].median_seconds}};
    if (i > 0) {
      const double ratio = rows[i].seconds / rows[i - 1].seconds;
      out << std::setw(10) << std::setprecision(2) << ratio;
      row["ratio"] = ratio;
    }
    out << "\n";
    table.push_back(row);
  }
  if (!a.out.empty()) {
    const std::string text =
        nlohmann::json{{"method", to_string(a.options.method)}, {"runs", a.options.runs}, {"rows", table}}
            .dump(2) +
        "\n";
    io::write_bytes({reinterpret_cast<const std::uint8_t*>(text.data()), text.size()}, a.out);
  }
}

void add_ecn_params(CLI::App* cmd, EcnParams& p) {
  cmd->add_option("--t", p.t, "first-level neighbors")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--q", p.q, "second-level neighbors per first-level neighbor")->capture_default_str();
  cmd->add_option("--k", p.k, "rank-list depth for the similarity")->capture_default_str()->check(CLI::PositiveNumber);
}

}  // namespace

std::vector<BenchRow> run_bench(const BenchOptions& options) {
  std::vector<BenchRow> rows;
  for (const std::size_t n : options.sizes) {
    synth::ClusterSpec spec;
    spec.seed = options.seed;
    spec.imgs_per_id = options.imgs_per_id;
    spec.n_ids = std::max<std::size_t>(n / options.imgs_per_id, 1);
    spec.dim = options.dim;
    const auto data = synth::generate_clusters(spec);
    EcnParams params = options.params;
    params.method = options.method;

    std::vector<double> times;
    for (std::size_t r = 0; r < std::max<std::size_t>(options.runs, 1); ++r) {
      const auto start = Clock::now();
      const auto result = rerank(data.features, params, data.records);
      times.push_back(seconds_since(start));
    }
    std::sort(times.begin(), times.end());
    rows.push_back({data.features.n_items, times.front(), times[times.size() / 2]});
  }
  return rows;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Expanded cross neighborhood re-ranking for retrieval", "ecn"};
  app.require_subcommand(1);
  app.footer(kExitCodes);
  int threads = 0;
  app.add_option("--threads", threads, "worker threads (0 = runtime default)");
  app.fallthrough();

  DistanceArgs dist_args;
  auto* dist_cmd = app.add_subcommand("distance", "pairwise distances over all feature rows");
  dist_cmd->add_option("--features", dist_args.features, "ECNF or .csv feature file")->required();
  dist_cmd->add_option("--metric", dist_args.metric)
      ->check(CLI::IsMember({"sqeuclidean", "cosine"}))
      ->capture_default_str();
  dist_cmd->add_option("--out", dist_args.out, "output ECND file")->required();

  RerankArgs rerank_args;
  auto* rerank_cmd = app.add_subcommand("rerank", "re-rank query x gallery distances");
  auto* feat_opt = rerank_cmd->add_option("--features", rerank_args.features, "ECNF or .csv feature file");
  auto* dist_opt = rerank_cmd->add_option("--distances", rerank_args.distances, "square ECND union distances");
  feat_opt->excludes(dist_opt);
  rerank_cmd->add_option("--meta", rerank_args.meta, "metadata CSV")->required();
  rerank_cmd->add_option("--method", rerank_args.method)
      ->check(CLI::IsMember({"none", "rank-dist", "ecn-orig", "ecn-rank"}))
      ->capture_default_str();
  add_ecn_params(rerank_cmd, rerank_args.params);
  rerank_cmd->add_option("--out", rerank_args.out, "output ECND file (queries x gallery)")->required();

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "mAP and CMC of a query x gallery distance matrix");
  eval_cmd->add_option("--distances", eval_args.distances, "ECND queries x gallery")->required();
  eval_cmd->add_option("--meta", eval_args.meta, "metadata CSV")->required();
  eval_cmd->add_option("--ranks", eval_args.ranks, "CMC cut-offs")->delimiter(',')->capture_default_str();
  eval_cmd->add_option("--distractor-ids", eval_args.distractors, "person ids never counted as matches")
      ->delimiter(',')
      ->capture_default_str();
  eval_cmd->add_option("--out", eval_args.out, "report JSON");

  SynthArgs synth_args;
  auto* synth_cmd = app.add_subcommand("synth", "write a Gaussian-cluster dataset");
  synth_cmd->add_option("--seed", synth_args.spec.seed)->capture_default_str();
  synth_cmd->add_option("--ids", synth_args.spec.n_ids)->capture_default_str();
  synth_cmd->add_option("--imgs", synth_args.spec.imgs_per_id)->capture_default_str();
  synth_cmd->add_option("--dim", synth_args.spec.dim)->capture_default_str();
  synth_cmd->add_option("--intra", synth_args.spec.intra_std)->capture_default_str();
  synth_cmd->add_option("--inter", synth_args.spec.inter_std)->capture_default_str();
  synth_cmd->add_option("--cams", synth_args.spec.n_cameras)->capture_default_str();
  synth_cmd->add_option("--out-prefix", synth_args.out_prefix, "writes PREFIX.ecnf and PREFIX.meta.csv")
      ->required();

  BenchArgs bench_args;
  auto* bench_cmd = app.add_subcommand("bench", "time re-ranking on synthetic data");
  bench_cmd->add_option("--sizes", bench_args.options.sizes)->delimiter(',')->capture_default_str();
  bench_cmd->add_option("--method", bench_args.method)
      ->check(CLI::IsMember({"none", "rank-dist", "ecn-orig", "ecn-rank"}))
      ->capture_default_str();
  bench_cmd->add_option("--runs", bench_args.options.runs)->capture_default_str();
  bench_cmd->add_option("--dim", bench_args.options.dim)->capture_default_str();
  bench_cmd->add_option("--seed", bench_args.options.seed)->capture_default_str();
  add_ecn_params(bench_cmd, bench_args.options.params);
  bench_cmd->add_option("--out", bench_args.out, "timing JSON");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  if (rerank_cmd->parsed() && rerank_args.features.empty() && rerank_args.distances.empty()) {
    err << "error: rerank needs --features or --distances\n";
    return 2;
  }

  set_num_threads(threads);
  try {
    if (dist_cmd->parsed()) cmd_distance(dist_args, out);
    if (rerank_cmd->parsed()) cmd_rerank(rerank_args, out);
    if (eval_cmd->parsed()) cmd_eval(eval_args, out);
    if (synth_cmd->parsed()) cmd_synth(synth_args, out);
    if (bench_cmd->parsed()) cmd_bench(bench_args, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace ecn::cli
