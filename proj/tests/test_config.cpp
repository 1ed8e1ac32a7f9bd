#include <sstream>

#include "doctest.h"
#include "osic/config.hpp"

using namespace osic;

namespace {

std::string error_key(Command cmd, const std::vector<std::pair<std::string, std::string>>& flags,
                      const std::optional<std::string>& file = std::nullopt) {
  try {
    parse_config(cmd, flags, file);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "<none>";
}

}  // namespace

TEST_CASE("defaults") {
  const RunConfig rc = parse_config(Command::BerSweep, {});
  CHECK(rc.sweep.n_t == 8);
  CHECK(rc.sweep.n_r == 8);
  CHECK(rc.sweep.subcarriers == 64);
  CHECK(rc.sweep.modulation == Modulation::Qam16);
  CHECK(rc.sweep.snr_db.size() == 10);
  CHECK(rc.sweep.snr_db.front() == 16.0);
  CHECK(rc.sweep.snr_db.back() == 34.0);
  REQUIRE(rc.sweep.variants.size() == 1);
  CHECK(rc.sweep.variants[0] == Variant::fixed(NullingCore::Mmse, 7));
  CHECK(rc.resolved.at("iters") == "7");
  CHECK(rc.resolved.at("nr") == "8");
  for (const auto& k : config_keys()) CHECK(rc.resolved.count(k.name) == 1);
}

TEST_CASE("range errors name the key") {
  CHECK(error_key(Command::BerSweep, {{"iters", "9"}, {"nt", "8"}}) == "iters");
  CHECK(error_key(Command::BerSweep, {{"iters", "-1"}}) == "iters");
  CHECK(error_key(Command::BerSweep, {{"nt", "four"}}) == "nt");
  CHECK(error_key(Command::BerSweep, {{"nt", "4"}, {"nr", "2"}}) == "nr");
  CHECK(error_key(Command::BerSweep, {{"min-symbols", "100"}}) == "min-symbols");
  CHECK(error_key(Command::BerSweep, {{"snr", "10:0:20"}}) == "snr");
  CHECK(error_key(Command::BerSweep, {{"mod", "bpsk"}}) == "mod");
  CHECK(error_key(Command::BerSweep, {{"detector", "sphere"}}) == "detector");
  CHECK(error_key(Command::BerSweep, {{"emit-plot", "maybe"}}) == "emit-plot");
  CHECK(error_key(Command::BerSweep, {{"preset", "fig99"}}) == "preset");
  CHECK(error_key(Command::BerSweep, {{"calib", "/nonexistent.csv"}}) == "calib");
  CHECK(error_key(Command::Bench, {{"bench-trials", "10"}}) == "bench-trials");
  CHECK(error_key(Command::FormulaEval, {{"snr", "1,2"}}) == "snr");
  CHECK(error_key(Command::BerSweep, {}, std::string("bogus = 1\n")) == "bogus");
  CHECK(error_key(Command::BerSweep, {{"bogus", "1"}}) == "bogus");
  CHECK(error_key(Command::BerSweep, {}, std::string("nt 8\n")) == "");
}

TEST_CASE("precedence") {
  const std::string file = "# comment\nnt = 4\nseed = 9\nworkers = 2\n\n";
  SUBCASE("file over defaults") {
    const RunConfig rc = parse_config(Command::BerSweep, {}, file);
    CHECK(rc.sweep.n_t == 4);
    CHECK(rc.sweep.seed == 9);
    CHECK(rc.sweep.workers == 2);
  }
  SUBCASE("flags over file") {
    const RunConfig rc = parse_config(Command::BerSweep, {{"nt", "6"}}, file);
    CHECK(rc.sweep.n_t == 6);
    CHECK(rc.sweep.seed == 9);
  }
  SUBCASE("environment over file, flags over environment") {
    CHECK(parse_config(Command::BerSweep, {}, file, std::string("5")).sweep.workers == 5);
    CHECK(parse_config(Command::BerSweep, {{"workers", "3"}}, file, std::string("5")).sweep.workers ==
          3);
  }
  SUBCASE("preset under file and flags") {
    const RunConfig p = parse_config(Command::BerSweep, {{"preset", "fig2c"}});
    CHECK(p.sweep.n_t == 4);
    CHECK(p.preset == "fig2c");
    const RunConfig q = parse_config(Command::BerSweep, {{"preset", "fig2c"}, {"nt", "6"}});
    CHECK(q.sweep.n_t == 6);
  }
}

TEST_CASE("variants per command") {
  const RunConfig it = parse_config(Command::IterSweep, {{"nt", "4"}, {"core", "zf"}});
  REQUIRE(it.sweep.variants.size() == 4);
  for (int n = 0; n < 4; ++n) CHECK(it.sweep.variants[n] == Variant::fixed(NullingCore::Zf, n));
  CHECK(parse_config(Command::BerSweep, {{"detector", "ml"}, {"nt", "2"}}).sweep.variants[0] ==
        Variant::ml());
  CHECK(parse_config(Command::BerSweep, {{"detector", "zf"}}).sweep.variants[0] ==
        Variant::linear(NullingCore::Zf));
  CHECK(parse_config(Command::BerSweep, {{"policy", "formula"}}).sweep.variants[0] ==
        Variant::formula(NullingCore::Mmse));
  const RunConfig fe = parse_config(Command::FormulaEval, {{"snr", "25"}});
  CHECK(fe.eval_snr == 25.0);
}

TEST_CASE("SNR lists") {
  CHECK(parse_config(Command::BerSweep, {{"snr", "0:3:30"}}).sweep.snr_db.size() == 11);
  const RunConfig rc = parse_config(Command::BerSweep, {{"snr", "1.5, 2 ,7"}});
  CHECK(rc.sweep.snr_db == std::vector<double>{1.5, 2.0, 7.0});
  CHECK(rc.resolved.at("snr") == "1.5,2,7");
  // Ranges accumulate without drift.
  const auto fine = parse_config(Command::BerSweep, {{"snr", "16:0.1:34"}}).sweep.snr_db;
  CHECK(fine.size() == 181);
  CHECK(fine.back() == doctest::Approx(34.0));
}

TEST_CASE("manifest round trip") {
  const RunConfig rc = parse_config(Command::Compare, {{"nt", "4"}, {"seed", "17"}, {"snr", "0:5:10"}});
  RunManifest m;
  m.command = "compare";
  m.config = rc.resolved;
  m.rng = std::string(Rng::kAlgorithm);
  m.timestamp = "2026-01-01T00:00:00Z";
  m.outputs = {"compare.csv", "compare.manifest"};
  std::stringstream ss;
  m.write(ss);
  const RunManifest back = RunManifest::read(ss);
  CHECK(back == m);

  // The manifest body is itself a valid config file that resolves identically.
  std::stringstream again;
  m.write(again);
  const RunConfig re = parse_config(Command::Compare, {}, again.str());
  CHECK(re.resolved == rc.resolved);
  CHECK(is_manifest_key("timestamp"));
  CHECK_FALSE(is_manifest_key("nt"));
}

TEST_CASE("command names") {
  CHECK(parse_command("iter-sweep") == Command::IterSweep);
  CHECK(to_string(Command::FormulaEval) == "formula-eval");
  CHECK_THROWS_AS(parse_command("sweep"), ConfigError);
}
