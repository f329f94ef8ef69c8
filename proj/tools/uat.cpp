// uat: task banks, experiments, the session service, reports and audits.

#include <csignal>
#include <fstream>
#include <iomanip>
#include <iostream>

#include <CLI11.hpp>

#include "uat/agents/agent.hpp"
#include "uat/harness/experiment.hpp"
#include "uat/harness/service.hpp"
#include "uat/interface/codec.hpp"
#include "uat/refmachine/kt.hpp"
#include "uat/taskgen/task_class.hpp"

namespace {

using namespace uat;

harness::HttpServer* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

std::ostream& open_or_stdout(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw std::runtime_error("cannot write " + path);
  return file;
}

void print_bank(const taskgen::Bank& bank) {
  const auto& cls = bank.tasks;
  std::cout << cls.size() << " tasks, " << cls.stratum_count() << " strata, search budget "
            << bank.budget.max_len << " symbols / " << bank.budget.max_steps << " steps\n";
  for (int s = 0; s < cls.stratum_count(); ++s) {
    const auto band = cls.band(s);
    std::cout << "  stratum " << s << " [" << band.lo << ", " << band.hi << "): " << cls.stratum(s).size() << " tasks\n";
    for (auto i : cls.stratum(s)) {
      const auto& t = cls.task(i);
      std::cout << "    " << std::left << std::setw(14) << t.id << std::right << std::fixed << std::setprecision(3)
                << t.difficulty.value << (t.difficulty_exact ? "  " : "* ") << t.generator.text() << '\n';
      std::cout.unsetf(std::ios::fixed);
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive cognitive test workbench"};
  app.require_subcommand(1);

  // generate-bank
  auto* gen = app.add_subcommand("generate-bank", "Generate a Kt-graded task bank");
  std::string gen_out = "bank.tsv";
  taskgen::BankOptions bank_opts;
  gen->add_option("-o,--out", gen_out, "Output file")->capture_default_str();
  gen->add_option("--edges", bank_opts.band_edges, "Stratum edges in Kt bits")->capture_default_str();
  gen->add_option("--per-stratum", bank_opts.tasks_per_stratum, "Tasks per stratum")->capture_default_str();
  gen->add_option("--seed", bank_opts.seed, "Generation seed")->capture_default_str();
  gen->add_option("--max-len", bank_opts.generation.budget.max_len, "Kt search: program length")->capture_default_str();
  gen->add_option("--max-steps", bank_opts.generation.budget.max_steps, "Kt search: steps")->capture_default_str();
  gen->add_option("--threads", bank_opts.threads, "Worker threads (0 = all cores)")->capture_default_str();

  auto* show = app.add_subcommand("show-bank", "Print a bank's strata and tasks");
  std::string show_path;
  show->add_option("bank", show_path, "Bank file")->required();

  // run
  auto* run = app.add_subcommand("run", "Run an experiment spec");
  std::string run_spec, run_out, run_summary;
  unsigned run_threads = 0;
  run->add_option("spec", run_spec, "Experiment spec (JSON)")->required();
  run->add_option("-o,--out", run_out, "Session records (JSON lines)");
  run->add_option("--summary", run_summary, "Summary table (default: stdout)");
  run->add_option("--threads", run_threads, "Worker threads (0 = all cores)");

  // serve
  auto* serve = app.add_subcommand("serve", "Serve adaptive tests to external subjects over HTTP");
  std::string serve_spec, serve_host = "127.0.0.1", serve_store = "sessions";
  int serve_port = 8080;
  serve->add_option("spec", serve_spec, "Experiment spec (JSON)")->required();
  serve->add_option("--host", serve_host)->capture_default_str();
  serve->add_option("--port", serve_port)->capture_default_str();
  serve->add_option("--store", serve_store, "Session log directory")->capture_default_str();

  // report
  auto* rep = app.add_subcommand("report", "Summarize session records");
  std::string rep_in, rep_summary, rep_curves;
  rep->add_option("records", rep_in, "Session records (JSON lines)")->required();
  rep->add_option("--summary", rep_summary, "Summary table (default: stdout)");
  rep->add_option("--curves", rep_curves, "Per-configuration score curves");

  // audit
  auto* aud = app.add_subcommand("audit", "Recompute every stored estimate from its history");
  std::string aud_in;
  aud->add_option("records", aud_in, "Session records (JSON lines)")->required();

  // codecs
  auto* cod = app.add_subcommand("codecs", "List codecs and check them for fairness");
  std::size_t cod_samples = 10000;
  std::uint64_t cod_seed = 1;
  cod->add_option("--samples", cod_samples)->capture_default_str();
  cod->add_option("--seed", cod_seed)->capture_default_str();

  app.add_subcommand("agents", "List reference agents");

  // kt
  auto* kt = app.add_subcommand("kt", "Kt complexity and best continuation of a sequence");
  std::string kt_seq;
  refmachine::SearchBudget kt_budget{12, 1u << 12};
  kt->add_option("sequence", kt_seq, "Letters, e.g. adgj")->required();
  kt->add_option("--max-len", kt_budget.max_len)->capture_default_str();
  kt->add_option("--max-steps", kt_budget.max_steps)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      const auto bank = taskgen::generate_bank(bank_opts);
      taskgen::save_bank(gen_out, bank);
      print_bank(bank);
      std::cout << "wrote " << gen_out << '\n';
    } else if (*show) {
      print_bank(taskgen::load_bank(show_path));
    } else if (*run) {
      const auto spec = harness::load_spec(run_spec);
      const auto result = harness::run_experiment(spec, run_threads);
      if (!run_out.empty()) harness::save_records(run_out, result.records);
      std::ofstream f;
      harness::write_summary(open_or_stdout(run_summary, f), result.summary);
    } else if (*serve) {
      const auto spec = harness::load_spec(serve_spec);
      harness::SessionService service(spec, harness::resolve_bank(spec), {serve_store, {}});
      harness::HttpServer server(service);
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cerr << "serving on http://" << serve_host << ":" << serve_port << " (" << service.sessions().size()
                << " sessions restored)\n";
      server.run(serve_host, serve_port);
    } else if (*rep) {
      const auto records = harness::load_records(rep_in);
      std::ofstream f;
      harness::write_summary(open_or_stdout(rep_summary, f), harness::summarize(records));
      if (!rep_curves.empty()) {
        std::ofstream c(rep_curves);
        harness::write_curves(c, records);
      }
    } else if (*aud) {
      const auto records = harness::load_records(aud_in);
      const auto findings = harness::audit(records);
      for (const auto& f : findings) std::cout << f.session << ": " << f.problem << '\n';
      std::cout << records.size() << " sessions audited, " << findings.size() << " problems\n";
      return findings.empty() ? 0 : 1;
    } else if (app.got_subcommand("codecs")) {
      const auto sample = interface::random_sequences(cod_samples, cod_seed, refmachine::kDefaultAlphabet);
      const std::vector<std::optional<refmachine::Symbol>> no_answers(sample.size());
      bool ok = true;
      for (const auto& id : interface::codec_ids()) {
        const auto codec = interface::make_codec(id, refmachine::kDefaultAlphabet);
        const auto r = interface::fairness_check(*codec, sample, no_answers);
        ok &= r.ok();
        std::cout << std::left << std::setw(8) << id << std::right << " example '"
                  << codec->render(refmachine::SymbolSequence::parse("adgj")) << "'  roundtrip failures "
                  << r.roundtrip_failures << ", collisions " << r.collisions << ", leaks " << r.leaks << '\n';
      }
      return ok ? 0 : 1;
    } else if (app.got_subcommand("agents")) {
      for (const auto& n : agents::agent_names()) std::cout << n << '\n';
    } else if (*kt) {
      const auto x = refmachine::SymbolSequence::parse(kt_seq);
      const auto r = refmachine::kt_complexity(x, kt_budget);
      std::cout << "Kt(" << x.compact() << ") = " << r.value.value << "  (" << r.cost.length << " symbols, "
                << r.cost.steps << " steps)\nwitness: " << r.witness.text() << '\n';
      const auto p = refmachine::continuation_profile(x, kt_budget);
      if (p.best) {
        std::cout << "next: " << refmachine::symbol_char(p.best->symbol) << " at Kt " << p.best->result.value.value;
        if (p.runner_up) {
          std::cout << ", runner-up " << refmachine::symbol_char(p.runner_up->symbol) << " at "
                    << p.runner_up->result.value.value;
        }
        std::cout << '\n';
      }
    }
  } catch (const harness::SpecInvalid& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const refmachine::NotFoundWithinBudget& e) {
    std::cerr << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
