// evtbench: block-maxima and peak-over-threshold tail estimation plus a
// deterministic Monte-Carlo benchmark harness.
//
// Exit codes: 0 success, 1 usage error, 2 runtime/estimation error. Every
// error prints a machine-parsable "E:<code>" line on stderr before the
// human-readable message.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "evt/blocking.hpp"
#include "evt/distributions.hpp"
#include "evt/errors.hpp"
#include "evt/extremal_index.hpp"
#include "evt/fitters.hpp"
#include "evt/harness.hpp"
#include "evt/io.hpp"
#include "evt/multivariate.hpp"
#include "evt/tail_targets.hpp"

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::fputs(text.c_str(), stdout);
  } else {
    evt::write_text_file(out_path, text);
  }
}

evt::DataModel data_model(const std::string& dist, const std::string& model) {
  if (!dist.empty() && !model.empty())
    throw UsageError("give either --dist or --model, not both");
  if (!dist.empty()) return evt::DataModel::from_dist(evt::parse_spec(dist));
  if (!model.empty()) return evt::DataModel::from_ts(evt::parse_model(model));
  throw UsageError("need --dist or --model");
}

evt::BlockScheme parse_scheme(const std::string& s) {
  if (s == "disjoint") return evt::BlockScheme::disjoint;
  if (s == "sliding") return evt::BlockScheme::sliding;
  throw UsageError("--scheme must be disjoint or sliding");
}

evt::ThetaChoice parse_theta(const std::string& s) {
  if (s == "none") return evt::ThetaChoice::none;
  if (s == "intervals") return evt::ThetaChoice::intervals;
  if (s == "blocks") return evt::ThetaChoice::blocks;
  throw UsageError("--theta-method must be none, intervals or blocks");
}

// "50,100,200" or "50:500:50"
std::vector<std::size_t> parse_k_grid(const std::string& text) {
  std::vector<std::size_t> ks;
  if (text.find(':') != std::string::npos) {
    std::size_t lo, hi, step;
    if (std::sscanf(text.c_str(), "%zu:%zu:%zu", &lo, &hi, &step) != 3 ||
        step == 0 || lo > hi)
      throw UsageError("bad k grid range '" + text + "', expected lo:hi:step");
    for (std::size_t k = lo; k <= hi; k += step) ks.push_back(k);
    return ks;
  }
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    try {
      ks.push_back(std::stoul(text.substr(pos, comma - pos)));
    } catch (const std::exception&) {
      throw UsageError("bad k grid '" + text + "'");
    }
    pos = comma + 1;
    if (comma == text.size()) break;
  }
  if (ks.empty()) throw UsageError("empty k grid");
  return ks;
}

std::string json_out_path(const std::string& csv_path) {
  const std::size_t dot = csv_path.find_last_of('.');
  if (dot == std::string::npos) return csv_path + ".json";
  return csv_path.substr(0, dot) + ".json";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"block-maxima vs peak-over-threshold tail estimation bench"};
  app.require_subcommand(1);

  // shared option storage; each subcommand registers the flags it accepts
  std::string dist, model, method, theta_method;
  std::string scheme = "disjoint", out, config_path, kgrid_text, dep, in_path;
  std::string sample_out;
  std::size_t n = 0, k = 0, r = 0, reps = 1, dim = 2;
  double p = 0.0, T = 0.0;
  std::uint64_t seed = 0;
  int threads = 0;

  const auto add_data = [&](CLI::App* cmd) {
    cmd->add_option("--dist", dist, "distribution spec, e.g. gp(0.5,1)");
    cmd->add_option("--model", model, "time series model, e.g. armax(0.5)");
    cmd->add_option("--n", n, "sample size")->required();
    cmd->add_option("--seed", seed, "64-bit seed");
  };

  CLI::App* c_fit = app.add_subcommand("fit", "fit one tail model");
  add_data(c_fit);
  c_fit->add_option("--method", method, "gev_ml|gev_pwm|gp_ml|gp_pwm|hill")->required();
  c_fit->add_option("--k", k, "number of upper order statistics");
  c_fit->add_option("--r", r, "block size");
  c_fit->add_option("--scheme", scheme, "disjoint|sliding");
  c_fit->add_option("--out", out, "output file (default stdout)");

  CLI::App* c_sim = app.add_subcommand("simulate", "write a simulated series");
  add_data(c_sim);
  c_sim->add_option("--r", r, "emit block maxima of this block size");
  c_sim->add_option("--scheme", scheme, "disjoint|sliding");
  c_sim->add_option("--out", out, "output file (default stdout)");

  CLI::App* c_ksweep = app.add_subcommand("ksweep", "estimate vs k curve");
  add_data(c_ksweep);
  c_ksweep->add_option("--method", method, "fitter or pipeline")->required();
  c_ksweep->add_option("--k", kgrid_text, "grid: lo:hi:step or k1,k2,...")->required();
  c_ksweep->add_option("--reps", reps, "replications");
  c_ksweep->add_option("--p", p, "quantile level for pipeline methods");
  c_ksweep->add_option("--T", T, "return period for pipeline methods");
  c_ksweep->add_option("--r", r, "block size for return-level targets");
  c_ksweep->add_option("--theta-method", theta_method, "none|intervals|blocks");
  c_ksweep->add_option("--threads", threads, "worker threads (0 = auto)");
  c_ksweep->add_option("--out", out, "output file (default stdout)");

  CLI::App* c_race = app.add_subcommand("horserace", "Monte-Carlo comparison");
  c_race->add_option("--config", config_path, "JSON experiment config")->required();
  c_race->add_option("--out", out, "report CSV path (JSON lands next to it)")->required();
  c_race->add_option("--threads", threads, "worker threads (0 = auto)");

  CLI::App* c_theta = app.add_subcommand("theta", "extremal index estimate");
  add_data(c_theta);
  c_theta->add_option("--k", k, "threshold rank")->required();
  c_theta->add_option("--r", r, "block size (blocks estimator)");
  c_theta->add_option("--theta-method", theta_method, "intervals|blocks");
  c_theta->add_option("--out", out, "output file (default stdout)");

  CLI::App* c_quant = app.add_subcommand("quantile", "high quantile estimate");
  add_data(c_quant);
  c_quant->add_option("--method", method, "pot|bm (default pot)");
  c_quant->add_option("--p", p, "upper tail level")->required();
  c_quant->add_option("--k", k, "number of upper order statistics");
  c_quant->add_option("--r", r, "block size (bm)");
  c_quant->add_option("--theta-method", theta_method, "none|intervals|blocks");
  c_quant->add_option("--scheme", scheme, "disjoint|sliding");
  c_quant->add_option("--out", out, "output file (default stdout)");

  CLI::App* c_rl = app.add_subcommand("returnlevel", "T-return level of block maxima");
  add_data(c_rl);
  c_rl->add_option("--method", method, "bm|pot (default bm)");
  c_rl->add_option("--T", T, "return period in blocks")->required();
  c_rl->add_option("--r", r, "block size")->required();
  c_rl->add_option("--k", k, "threshold rank (pot)");
  c_rl->add_option("--theta-method", theta_method, "intervals|blocks");
  c_rl->add_option("--scheme", scheme, "disjoint|sliding");
  c_rl->add_option("--out", out, "output file (default stdout)");

  CLI::App* c_stdf = app.add_subcommand("stdf", "empirical stable tail dependence grid");
  c_stdf->add_option("--in", in_path, "headerless CSV matrix to evaluate");
  c_stdf->add_option("--dep", dep, "independence|comonotone|logistic(a)");
  c_stdf->add_option("--d", dim, "dimension (simulated input)");
  c_stdf->add_option("--n", n, "rows (simulated input)");
  c_stdf->add_option("--seed", seed, "64-bit seed");
  c_stdf->add_option("--k", k, "number of large observations")->required();
  c_stdf->add_option("--sample-out", sample_out, "also write the simulated matrix");
  c_stdf->add_option("--out", out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "E:usage\n" << e.what() << "\n";
    return 1;
  }

  try {
    if (*c_fit) {
      const evt::DataModel dm = data_model(dist, model);
      const evt::Series s = dm.simulate(n, seed);
      evt::TailFit fit;
      if (method == "gev_ml" || method == "gev_pwm") {
        if (r == 0) throw UsageError("BM fits need --r");
        const auto bm = evt::block_maxima(s.view(), r, parse_scheme(scheme));
        fit = method == "gev_ml" ? evt::fit_gev_ml(bm) : evt::fit_gev_pwm(bm);
      } else if (method == "gp_ml" || method == "gp_pwm") {
        if (k == 0) throw UsageError("POT fits need --k");
        const auto ex = evt::threshold_excesses(s.view(), k);
        fit = method == "gp_ml" ? evt::fit_gp_ml(ex) : evt::fit_gp_pwm(ex);
      } else if (method == "hill") {
        if (k == 0) throw UsageError("hill needs --k");
        fit = evt::hill(s, k);
      } else {
        throw UsageError("unknown fit method '" + method + "'");
      }
      emit(evt::tail_fit_csv_header() + "\n" + evt::tail_fit_csv_row(fit) + "\n", out);
      return 0;
    }

    if (*c_sim) {
      const evt::DataModel dm = data_model(dist, model);
      const evt::Series s = dm.simulate(n, seed);
      std::string text;
      if (r > 0) {
        const auto bm = evt::block_maxima(s.view(), r, parse_scheme(scheme));
        for (double v : bm.maxima) text += evt::format_double(v) + "\n";
      } else {
        for (double v : s.values) text += evt::format_double(v) + "\n";
      }
      emit(text, out);
      return 0;
    }

    if (*c_ksweep) {
      const evt::DataModel dm = data_model(dist, model);
      const auto grid = parse_k_grid(kgrid_text);
      evt::TargetSpec target;
      if (p > 0) target.p = p;
      if (T > 0) target.T = T;
      target.r = r;
      const auto hm = evt::parse_harness_method(method);
      const auto curve = evt::ksweep(
          dm, n, hm, grid, reps, seed, threads, target,
          parse_theta(theta_method.empty() ? "none" : theta_method));
      emit(evt::ksweep_csv(hm, n, curve), out);
      return 0;
    }

    if (*c_race) {
      const evt::ExperimentConfig cfg =
          evt::parse_config_json(evt::read_text_file(config_path));
      const evt::HorseRaceReport report = evt::run_horserace(cfg, threads);
      evt::write_text_file(out, evt::report_csv(report));
      evt::write_text_file(json_out_path(out), evt::report_json(report));
      return 0;
    }

    if (*c_theta) {
      const evt::DataModel dm = data_model(dist, model);
      const evt::Series s = dm.simulate(n, seed);
      evt::ThetaEstimate est;
      const std::string tm = theta_method.empty() ? "intervals" : theta_method;
      if (tm == "blocks") {
        if (r == 0) throw UsageError("blocks estimator needs --r");
        est = evt::theta_blocks(s, r, k);
      } else if (tm == "intervals") {
        est = evt::theta_intervals(s, k);
      } else {
        throw UsageError("--theta-method must be intervals or blocks");
      }
      emit(evt::theta_csv_header() + "\n" + evt::theta_csv_row(est) + "\n", out);
      return 0;
    }

    if (*c_quant) {
      const evt::DataModel dm = data_model(dist, model);
      if (method.empty()) method = "pot";
      evt::TargetEstimate est;
      if (method == "pot") {
        if (k == 0) throw UsageError("quantile pot needs --k");
        if (!(p > 0.0 && p < static_cast<double>(k) / static_cast<double>(n)))
          throw UsageError("quantile pot requires 0 < p < k/n");
        est = evt::quantile_pot(dm.simulate(n, seed), k, p);
      } else if (method == "bm") {
        if (r == 0) throw UsageError("quantile bm needs --r");
        const evt::Series s = dm.simulate(n, seed);
        std::optional<evt::ThetaEstimate> theta;
        switch (parse_theta(theta_method.empty() ? "none" : theta_method)) {
          case evt::ThetaChoice::intervals:
            if (k == 0) throw UsageError("theta intervals needs --k");
            theta = evt::theta_intervals(s, k);
            break;
          case evt::ThetaChoice::blocks:
            if (k == 0) throw UsageError("theta blocks needs --k");
            theta = evt::theta_blocks(s, r, k);
            break;
          case evt::ThetaChoice::none:
            break;
        }
        est = evt::quantile_bm(s, r, p, theta, parse_scheme(scheme));
      } else {
        throw UsageError("quantile method must be pot or bm");
      }
      emit(evt::target_csv_header() + "\n" + evt::target_csv_row(est) + "\n", out);
      return 0;
    }

    if (*c_rl) {
      const evt::DataModel dm = data_model(dist, model);
      if (method.empty()) method = "bm";
      const evt::Series s = dm.simulate(n, seed);
      evt::TargetEstimate est;
      if (method == "bm") {
        est = evt::return_level_bm(s, r, T, parse_scheme(scheme));
      } else if (method == "pot") {
        if (k == 0) throw UsageError("returnlevel pot needs --k");
        evt::ThetaEstimate theta;  // defaults to 1 under "none"
        switch (parse_theta(theta_method.empty() ? "intervals" : theta_method)) {
          case evt::ThetaChoice::intervals:
            theta = evt::theta_intervals(s, k);
            break;
          case evt::ThetaChoice::blocks:
            theta = evt::theta_blocks(s, r, k);
            break;
          case evt::ThetaChoice::none:
            break;
        }
        est = evt::return_level_pot(s, k, r, T, theta);
      } else {
        throw UsageError("returnlevel method must be bm or pot");
      }
      emit(evt::target_csv_header() + "\n" + evt::target_csv_row(est) + "\n", out);
      return 0;
    }

    if (*c_stdf) {
      std::optional<evt::DependenceModel> dm;
      evt::MultivariateSample sample;
      if (!in_path.empty()) {
        sample = evt::MultivariateSample::from_rows(evt::read_matrix_csv(in_path));
      } else if (!dep.empty()) {
        if (n == 0) throw UsageError("stdf --dep needs --n");
        dm = evt::parse_dependence(dep, dim);
        sample = evt::sample_dependence(*dm, n, seed);
        if (!sample_out.empty())
          evt::write_matrix_csv(sample_out, sample.n, sample.d, sample.data);
      } else {
        throw UsageError("stdf needs --in or --dep");
      }
      emit(evt::stdf_grid_csv(sample, k, dm ? &*dm : nullptr), out);
      return 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "E:usage\n" << e.what() << "\n";
    return 1;
  } catch (const evt::invalid_argument& e) {
    std::cerr << "E:" << e.code() << "\n" << e.what() << "\n";
    return 1;
  } catch (const evt::invalid_parameter& e) {
    std::cerr << "E:" << e.code() << "\n" << e.what() << "\n";
    return 1;
  } catch (const evt::error& e) {
    std::cerr << "E:" << e.code() << "\n" << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "E:internal\n" << e.what() << "\n";
    return 2;
  }
  return 0;
}
