#include <iostream>
#include <thread>

#include "CLI11.hpp"

#include "sbm/sbm.hpp"

namespace {

using sbm::json;

void emit(const json& j) { std::cout << j.dump(2) << '\n'; }

json verdict_json(const sbm::ThresholdVerdict& v) {
  return {{"f_value", v.f_value},
          {"recoverable", v.recoverable},
          {"connectivity_ok", v.connectivity_ok},
          {"equivalent_form_ok", v.equivalent_form_ok}};
}

json tail_json(const sbm::TailResult& t) {
  return {{"probability", t.probability},
          {"log_probability", std::isinf(t.log_probability) ? json(nullptr) : json(t.log_probability)},
          {"truncation_error_bound", t.truncation_error_bound},
          {"method", sbm::to_string(t.method)}};
}

sbm::PartialOracle make_oracle(const std::string& kind, double delta, bool trim) {
  if (kind == "spectral") return sbm::PartialOracle::spectral(trim);
  if (kind == "cheating") return sbm::PartialOracle::cheating(delta, 0);
  throw sbm::ValidationError("unknown oracle '" + kind + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-community stochastic block model: generation, recovery and tail numerics"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "sample a graph and its planted labeling");
  int gen_n = 0;
  double gen_alpha = 0, gen_beta = 0;
  std::uint64_t gen_seed = 0;
  std::string graph_out, labels_out;
  gen->add_option("--n", gen_n)->required();
  gen->add_option("--alpha", gen_alpha)->required();
  gen->add_option("--beta", gen_beta)->required();
  gen->add_option("--seed", gen_seed);
  gen->add_option("--graph-out", graph_out)->required();
  gen->add_option("--labels-out", labels_out)->required();

  // recover
  auto* rec = app.add_subcommand("recover", "run a recovery method on a graph file");
  std::string method = "sdp", graph_path, labels_path, oracle = "spectral";
  std::uint64_t rec_seed = 0;
  double split_c = 8.0, delta = 0.1;
  int rounds = 1;
  bool trim = false;
  rec->add_option("--method", method)->check(CLI::IsMember({"ml", "sdp", "certificate", "two-phase"}));
  rec->add_option("--graph", graph_path)->required();
  rec->add_option("--labels", labels_path);
  rec->add_option("--seed", rec_seed);
  rec->add_option("--split-c", split_c);
  rec->add_option("--oracle", oracle)->check(CLI::IsMember({"spectral", "cheating"}));
  rec->add_option("--delta", delta);
  rec->add_option("--rounds", rounds, "improvement rounds; more than 1 goes beyond the analysed procedure");
  rec->add_flag("--trim", trim, "spectral oracle: drop very high degree vertices first");

  // tail
  auto* tail = app.add_subcommand("tail", "exact tail of Z - W, or the exponent functions");
  std::int64_t mz = 0, mw = 0, s = 0;
  double p = 0, q = 0;
  bool exponent = false;
  double t_alpha = 0, t_beta = 0, eps = 0;
  std::int64_t t_m = 0, t_n = 0;
  tail->add_option("--mz", mz);
  tail->add_option("--mw", mw);
  tail->add_option("--p", p);
  tail->add_option("--q", q);
  tail->add_option("--s", s);
  tail->add_flag("--exponent", exponent);
  tail->add_option("--alpha", t_alpha);
  tail->add_option("--beta", t_beta);
  tail->add_option("--eps", eps);
  tail->add_option("--m", t_m);
  tail->add_option("--n", t_n);

  // threshold
  auto* thr = app.add_subcommand("threshold", "evaluate f(alpha, beta)");
  double th_alpha = 0, th_beta = 0;
  thr->add_option("--alpha", th_alpha)->required();
  thr->add_option("--beta", th_beta)->required();

  // events
  auto* ev = app.add_subcommand("events", "Monte Carlo rates of the lower-bound failure events");
  int ev_n = 0, ev_trials = 100;
  double ev_alpha = 0, ev_beta = 0;
  std::uint64_t ev_seed = 0;
  ev->add_option("--n", ev_n)->required();
  ev->add_option("--alpha", ev_alpha)->required();
  ev->add_option("--beta", ev_beta)->required();
  ev->add_option("--trials", ev_trials);
  ev->add_option("--seed", ev_seed);

  // phase
  auto* ph = app.add_subcommand("phase", "success-rate sweep over an (alpha, beta) grid");
  std::string ph_method = "certificate", ph_alpha = "2:40:2", ph_beta = "0:10:1", ph_out;
  int ph_n = 300, ph_trials = 20;
  std::uint64_t ph_seed = 0;
  unsigned ph_threads = std::max(1u, std::thread::hardware_concurrency());
  ph->add_option("--method", ph_method)->check(CLI::IsMember({"ml", "sdp", "certificate", "two-phase"}));
  ph->add_option("--n", ph_n);
  ph->add_option("--alpha", ph_alpha);
  ph->add_option("--beta", ph_beta);
  ph->add_option("--trials", ph_trials);
  ph->add_option("--seed", ph_seed);
  ph->add_option("--threads", ph_threads);
  ph->add_option("--split-c", split_c);
  ph->add_option("--oracle", oracle)->check(CLI::IsMember({"spectral", "cheating"}));
  ph->add_option("--delta", delta);
  ph->add_option("--out", ph_out)->required();

  // curves
  auto* cu = app.add_subcommand("curves", "red and green boundary curves");
  std::string cu_beta = "0:10:0.5", cu_out;
  cu->add_option("--beta", cu_beta);
  cu->add_option("--out", cu_out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*gen) {
      const auto sample = sbm::generate_sbm(sbm::SbmParams::make(gen_n, gen_alpha, gen_beta), gen_seed);
      sbm::write_file(graph_out, sbm::write_graph(sample.graph));
      sbm::write_file(labels_out, sbm::write_labeling(sample.truth));
      emit({{"n", gen_n}, {"edges", sample.graph.edge_count()}, {"seed", gen_seed}});
    } else if (*rec) {
      const auto g = sbm::parse_graph(sbm::read_file(graph_path));
      std::optional<sbm::Labeling> truth;
      if (!labels_path.empty()) {
        truth = sbm::parse_labeling(sbm::read_file(labels_path));
        sbm::require(truth->size() == g.n(), "labeling length differs from graph size");
      }
      sbm::TrialOptions opts;
      opts.split.c = split_c;
      opts.oracle = make_oracle(oracle, delta, trim);
      opts.oracle.oracle_seed = sbm::derive_seed(rec_seed, 0xc4ea7);
      opts.rounds = rounds;
      if (rounds > 1) std::cerr << "warning: more than one improvement round is beyond the analysed procedure\n";
      auto r = sbm::evaluate_method(sbm::parse_method(method), g, truth ? &*truth : nullptr, rec_seed, opts);
      emit(sbm::to_json(r));
    } else if (*tail) {
      if (exponent) {
        sbm::require(t_alpha > 0 && t_beta > 0, "--exponent needs --alpha and --beta > 0");
        json out = {{"alpha", t_alpha},
                    {"beta", t_beta},
                    {"eps", eps},
                    {"tau_star", sbm::tau_star(t_alpha, t_beta, eps)},
                    {"g", sbm::g_exponent(t_alpha, t_beta, eps)}};
        if (t_m > 0 || t_n > 0) {
          out["m"] = t_m;
          out["n"] = t_n;
          out["log_T_star"] = sbm::log_T_star(t_m, t_n, t_alpha, t_beta, eps);
          out["window_validated"] = sbm::t_star_window_validated(t_m, t_n);
        }
        emit(out);
      } else {
        emit(tail_json(sbm::diff_binomial_tail(mz, mw, p, q, s)));
      }
    } else if (*thr) {
      emit(verdict_json(sbm::threshold_f(th_alpha, th_beta)));
    } else if (*ev) {
      const auto r = sbm::estimate_event_probabilities(sbm::SbmParams::make(ev_n, ev_alpha, ev_beta), ev_trials, ev_seed);
      emit({{"trials", r.trials},
            {"f_rate", r.f_rate ? json(*r.f_rate) : json(nullptr)},
            {"fa_rate", r.fa_rate},
            {"delta_rate", r.delta_rate},
            {"fh_rate", r.fh_rate},
            {"implication_violations", r.implication_violations},
            {"h_size", r.h_size},
            {"delta", r.delta},
            {"desk_scale_fallback", r.desk_scale_fallback}});
    } else if (*ph) {
      const auto m = sbm::parse_method(ph_method);
      if (m == sbm::Method::sdp || m == sbm::Method::two_phase)
        std::cerr << "warning: solver-based success is slow; certificate is the default method\n";
      sbm::TrialOptions opts;
      opts.split.c = split_c;
      opts.oracle = make_oracle(oracle, delta, trim);
      const auto points = sbm::phase_diagram(m, ph_n, sbm::parse_range(ph_alpha), sbm::parse_range(ph_beta),
                                             ph_trials, ph_seed, ph_threads, opts);
      sbm::write_file(ph_out, sbm::phase_csv(points));
      emit({{"points", points.size()}, {"out", ph_out}});
    } else if (*cu) {
      const auto curves = sbm::boundary_curves(sbm::parse_range(cu_beta));
      sbm::write_file(cu_out, sbm::curves_csv(curves));
      emit({{"points", curves.size()}, {"out", cu_out}});
    }
  } catch (const sbm::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const sbm::ConvergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
