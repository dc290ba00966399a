#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sobscale/driver.hpp>
#include <sobscale/errors.hpp>
#include <sobscale/io.hpp>

#include "test_helpers.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace sobscale;
using namespace sobscale::testing;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

Json parse_file(const fs::path& p) { return Json::parse(read_file(p)); }

/// Drops every line mentioning the timestamp (the one documented
/// non-reproducible field) so the rest can be compared byte for byte.
std::string without_timestamp(const std::string& text) {
    std::istringstream in(text);
    std::string line, out;
    while (std::getline(in, line))
        if (line.find("\"timestamp\"") == std::string::npos) out += line + "\n";
    return out;
}

fs::path fresh_dir(const std::string& leaf) {
    const fs::path p = fs::path("io_test_tmp") / leaf;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

void write_config(const fs::path& p, const Json& config) {
    write_text_atomic(p, config.dump(2) + "\n");
}

bool same_coeffs(const TrigPoly& a, const TrigPoly& b) {
    return a.dim() == b.dim() && a.coeffs() == b.coeffs();
}

}  // namespace

TEST_CASE("weight literals round-trip through JSON") {
    const RoFunction lp = RoFunction::log_power(1.5, -1.0, 0.5);
    const Json jl = weight_to_json(lp);
    CHECK(jl.at("kind") == "log_power");
    CHECK(jl.at("s") == 1.5);
    CHECK(jl.at("b1") == -1.0);
    CHECK(jl.at("b2") == 0.5);
    const RoFunction lp2 = weight_from_json(Json::parse(jl.dump()), "test");
    const auto p = lp2.log_power_params();
    REQUIRE(p.has_value());
    CHECK(p->s == 1.5);
    CHECK(p->b1 == -1.0);
    CHECK(p->b2 == 0.5);

    const RoFunction ps = RoFunction::power_sine_log(0.5, 0.3);
    const RoFunction ps2 = weight_from_json(weight_to_json(ps), "test");
    const auto q = ps2.power_sine_log_params();
    REQUIRE(q.has_value());
    CHECK(q->s == 0.5);
    CHECK(q->theta == 0.3);

    // a shift is folded into the serialized parameters
    const Json js = weight_to_json(lp.shifted(0.5));
    CHECK(js.at("s") == 2.0);
}

TEST_CASE("log_power defaults b1 and b2 to zero on input") {
    const RoFunction w = weight_from_json(Json{{"kind", "log_power"}, {"s", 2.0}}, "test");
    const auto p = w.log_power_params();
    REQUIRE(p.has_value());
    CHECK(p->b1 == 0.0);
    CHECK(p->b2 == 0.0);
}

TEST_CASE("tabulated weights serialize their samples and effective extension") {
    const std::vector<double> ts{1.0, 2.0, 4.0, 8.0};
    const std::vector<double> vals{1.0, 4.0, 16.0, 64.0};
    const RoFunction tab = RoFunction::tabulated(ts, vals);  // exponent fitted
    const Json j = weight_to_json(tab);
    CHECK(j.at("kind") == "tabulated");
    CHECK(j.at("t").size() == 4);
    CHECK(j.at("phi")[3] == 64.0);
    CHECK(j.at("extension_exponent").get<double>() == doctest::Approx(2.0).epsilon(1e-9));
    const RoFunction back = weight_from_json(Json::parse(j.dump()), "test");
    for (double t : {1.0, 3.0, 8.0, 100.0})
        CHECK(back(t) == doctest::Approx(tab(t)).epsilon(1e-12));

    // shifted tabulated weights serialize t^shift folded into the samples
    const RoFunction shifted = tab.shifted(1.0);
    const Json js = weight_to_json(shifted);
    CHECK(js.at("phi")[1] == doctest::Approx(8.0).epsilon(1e-12));
    const RoFunction back2 = weight_from_json(js, "test");
    for (double t : {1.0, 3.0, 8.0, 100.0})
        CHECK(back2(t) == doctest::Approx(shifted(t)).epsilon(1e-12));
}

TEST_CASE("weights without a literal form refuse to serialize") {
    const RoFunction bg = RoFunction::from_bg([](double) { return 0.0; }, 0.0,
                                              [](double) { return 1.0; }, 1.0);
    CHECK_THROWS_AS(weight_to_json(bg), ConfigError);
}

TEST_CASE("weight parsing is strict") {
    CHECK_THROWS_AS(weight_from_json(Json{{"kind", "chebyshev"}, {"s", 1.0}}, "t"), ConfigError);
    CHECK_THROWS_AS(weight_from_json(Json{{"s", 1.0}}, "t"), ConfigError);
    CHECK_THROWS_AS(weight_from_json(Json{{"kind", "log_power"}, {"s", 1.0}, {"extra", 2}}, "t"),
                    ConfigError);
    CHECK_THROWS_AS(weight_from_json(Json{{"kind", "log_power"}, {"s", "one"}}, "t"), ConfigError);
    CHECK_THROWS_AS(weight_from_json(Json{{"kind", "power_sine_log"}, {"s", 1.0}}, "t"),
                    ConfigError);
}

TEST_CASE("trig polynomial literals are sorted and round-trip exactly") {
    std::map<Frequency, Complex> coeffs;
    coeffs[Frequency{{-2}}] = Complex(0.0, -1.25);
    coeffs[Frequency{{1}}] = Complex(1.0 / 3.0, 0.7);
    coeffs[Frequency{{5}}] = Complex(-2.0, 0.0);
    const TrigPoly u(1, coeffs);

    const Json j = poly_to_json(u);
    REQUIRE(j.is_array());
    REQUIRE(j.size() == 3);
    CHECK(j[0].at("k")[0] == -2);  // map order = lexicographic frequency order
    CHECK(j[1].at("k")[0] == 1);
    CHECK(j[2].at("k")[0] == 5);

    // exact coefficient recovery through a full text round trip
    const TrigPoly back = poly_from_json(Json::parse(j.dump()), 1, "test");
    CHECK(same_coeffs(u, back));

    // omitted re/im default to zero
    const TrigPoly sparse =
        poly_from_json(Json::parse(R"([{"k":[3],"im":2.0},{"k":[0],"re":1.0}])"), 1, "test");
    CHECK(sparse.coeffs().at(Frequency{{3}}) == Complex(0.0, 2.0));
    CHECK(sparse.coeffs().at(Frequency{{0}}) == Complex(1.0, 0.0));

    // the zero polynomial is an empty array both ways
    CHECK(poly_to_json(TrigPoly(1)).empty());
    CHECK(poly_from_json(Json::array(), 2, "test").is_zero());
}

TEST_CASE("trig polynomial parsing rejects malformed input") {
    CHECK_THROWS_AS(poly_from_json(Json::parse(R"([{"k":[1,2],"re":1}])"), 1, "t"), ConfigError);
    CHECK_THROWS_AS(poly_from_json(Json::parse(R"([{"k":[1],"weird":1}])"), 1, "t"), ConfigError);
    CHECK_THROWS_AS(poly_from_json(Json::parse(R"([{"re":1}])"), 1, "t"), ConfigError);
    CHECK_THROWS_AS(
        poly_from_json(Json::parse(R"([{"k":[4],"re":1},{"k":[4],"im":1}])"), 1, "t"),
        ConfigError);  // duplicate frequency
    CHECK_THROWS_AS(poly_from_json(Json::parse(R"({"k":[1]})"), 1, "t"), ConfigError);
}

TEST_CASE("vector literals round-trip with their shape") {
    const TrigVector v(std::vector<TrigPoly>{make_two_cos_x(), TrigPoly(1)});
    const Json j = vector_to_json(v);
    CHECK(j.at("dim") == 1);
    REQUIRE(j.at("components").size() == 2);
    const TrigVector back = vector_from_json(Json::parse(j.dump()), "test");
    CHECK(back.p() == 2);
    CHECK(back.dim() == 1);
    CHECK(same_coeffs(back[0], v[0]));
    CHECK(back[1].is_zero());

    CHECK_THROWS_AS(vector_from_json(Json{{"dim", 1}, {"components", Json::array()}}, "t"),
                    ConfigError);
    CHECK_THROWS_AS(vector_from_json(Json{{"components", Json::array({Json::array()})}}, "t"),
                    ConfigError);
    CHECK_THROWS_AS(
        vector_from_json(
            Json{{"dim", 1}, {"components", Json::array({Json::array()})}, {"x", 1}}, "t"),
        ConfigError);
}

TEST_CASE("scalar expression literals round-trip term by term") {
    // e^{ix} D^2 + 2 cos(x)
    const ScalarDiffOp L =
        ScalarDiffOp::term(MultiIndex{2}, TrigPoly::monomial(1, Frequency{{1}}, 1.0)) +
        ScalarDiffOp::multiplication(make_two_cos_x());
    const Json j = scalar_op_to_json(L);
    REQUIRE(j.at("terms").size() == 2);
    CHECK(j.at("terms")[0].at("alpha") == Json::array({0}));  // sorted by multi-index
    CHECK(j.at("terms")[1].at("alpha") == Json::array({2}));
    const ScalarDiffOp back = scalar_op_from_json(Json::parse(j.dump()), 1, "test");
    CHECK(same_terms(back, L));

    CHECK_THROWS_AS(scalar_op_from_json(Json::parse(R"({"terms":[{"alpha":[-1],"coeff":[]}]})"),
                                        1, "t"),
                    ConfigError);
    CHECK_THROWS_AS(scalar_op_from_json(Json::parse(R"({"terms":[{"alpha":[1,0],"coeff":[]}]})"),
                                        1, "t"),
                    ConfigError);
    CHECK_THROWS_AS(scalar_op_from_json(Json::parse(R"({"nope":[]})"), 1, "t"), ConfigError);
}

TEST_CASE("system literals round-trip entry by entry") {
    for (const MatrixDiffOp& A :
         {make_variable_coupled(), make_cauchy_riemann(), make_diag_dd()}) {
        const Json j = operator_to_json(A);
        CHECK(j.at("p") == A.p());
        CHECK(j.at("dim") == A.dim());
        const MatrixDiffOp back = operator_from_json(Json::parse(j.dump()), "test");
        CHECK(back.p() == A.p());
        CHECK(back.dim() == A.dim());
        for (int r = 0; r < A.p(); ++r)
            for (int c = 0; c < A.p(); ++c) CHECK(same_terms(back.entry(r, c), A.entry(r, c)));
        CHECK(back.column_orders() == A.column_orders());
    }

    Json bad = operator_to_json(make_diag_dd());
    bad["p"] = 1;
    CHECK_THROWS_AS(operator_from_json(bad, "t"), ConfigError);
    bad["p"] = 2;
    bad["dim"] = 3;
    CHECK_THROWS_AS(operator_from_json(bad, "t"), ConfigError);
    bad["dim"] = 1;
    bad["entries"][0].erase(1);
    CHECK_THROWS_AS(operator_from_json(bad, "t"), ConfigError);
}

TEST_CASE("report documents keep a fixed key order") {
    ExperimentReport rep;
    rep.name = "demo";
    rep.verdict = ExperimentVerdict::Pass;
    rep.parameters = {{"alpha", "1"}, {"beta", "two"}};
    rep.constants["c"] = 1.5;
    rep.note = "all good";
    rep.observations = {{8, 0, 0.5}, {16, 1, 1.0}};

    const Json doc = report_to_json(rep);
    std::vector<std::string> keys;
    for (const auto& item : doc.items()) keys.push_back(item.key());
    CHECK(keys == std::vector<std::string>{"name", "verdict", "parameters", "constants", "note",
                                           "observations"});
    CHECK(doc.at("verdict") == "pass");
    CHECK(doc.at("parameters")[0] == Json::array({"alpha", "1"}));
    CHECK(doc.at("constants").at("c") == 1.5);
    CHECK(doc.at("observations")[1].at("sample") == 1);

    CHECK(verdict_name(ExperimentVerdict::Fail) == "fail");
    CHECK(verdict_name(ExperimentVerdict::Inconclusive) == "inconclusive");

    const std::string csv = report_csv(rep);
    CHECK(csv.rfind("bandwidth,sample,value\n", 0) == 0);
    CHECK(csv.find("8,0,0.5\n") != std::string::npos);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}

TEST_CASE("atomic text writing creates directories and leaves no temp file") {
    const fs::path dir = fresh_dir("atomic");
    const fs::path target = dir / "nested" / "out.txt";
    write_text_atomic(target, "first\n");
    CHECK(read_file(target) == "first\n");
    write_text_atomic(target, "second\n");  // overwrite through rename
    CHECK(read_file(target) == "second\n");
    CHECK_FALSE(fs::exists(target.string() + ".tmp"));
}

TEST_CASE("driver: reports are byte-deterministic apart from the timestamp") {
    const fs::path dir = fresh_dir("determinism");
    const fs::path cfg = dir / "config.json";
    Json config;
    config["dim"] = 1;
    config["weight"] = weight_to_json(RoFunction::log_power(1.0));
    config["seed"] = 42;
    config["interp_check"] = Json{{"s0", 0.0}, {"s1", 2.0}, {"samples", 5}, {"bandwidth", 8}};
    write_config(cfg, config);

    RunOptions opt;
    opt.subcommand = "interp-check";
    opt.config_path = cfg.string();

    opt.out_dir = (dir / "run1").string();
    CHECK(run(opt) == 0);
    opt.out_dir = (dir / "run2").string();
    CHECK(run(opt) == 0);

    const std::string j1 = read_file(dir / "run1" / "interpolation_identity.json");
    const std::string j2 = read_file(dir / "run2" / "interpolation_identity.json");
    CHECK(without_timestamp(j1) == without_timestamp(j2));
    CHECK(read_file(dir / "run1" / "interpolation_identity.csv") ==
          read_file(dir / "run2" / "interpolation_identity.csv"));

    const Json doc = Json::parse(j1);
    CHECK(doc.at("verdict") == "pass");
    CHECK(doc.at("config").at("seed") == 42);
    CHECK(doc.at("config").at("section").at("bandwidth") == 8);
    CHECK(doc.at("observations").size() == 5);
    CHECK(doc.at("determinism").get<std::string>().find("timestamp") != std::string::npos);
}

TEST_CASE("driver: command-line seed and tolerance overrides reach the report") {
    const fs::path dir = fresh_dir("overrides");
    const fs::path cfg = dir / "config.json";
    Json config;
    config["dim"] = 1;
    config["weight"] = weight_to_json(RoFunction::log_power(1.0));
    config["interp_check"] = Json{{"s0", 0.0}, {"s1", 2.0}, {"samples", 3}, {"bandwidth", 8}};
    write_config(cfg, config);

    RunOptions opt;
    opt.subcommand = "interp-check";
    opt.config_path = cfg.string();
    opt.out_dir = (dir / "out").string();
    opt.seed = 777;
    CHECK(run(opt) == 0);
    Json doc = parse_file(dir / "out" / "interpolation_identity.json");
    CHECK(doc.at("config").at("seed") == 777);

    // an impossible identity tolerance turns the pass into a failure (exit 2)
    opt.tolerances = {{"identity_tol", 1e-30}};
    opt.out_dir = (dir / "strict").string();
    CHECK(run(opt) == 2);
    doc = parse_file(dir / "strict" / "interpolation_identity.json");
    CHECK(doc.at("verdict") == "fail");
    CHECK(doc.at("config").at("tolerances").at("identity_tol") == 1e-30);

    opt.tolerances = {{"no_such_tolerance", 1.0}};
    CHECK(run(opt) == 1);
}

TEST_CASE("driver: failed checks exit 2, inconclusive-only runs exit 3") {
    const fs::path dir = fresh_dir("exit_codes");

    // hyperbolic system: ellipticity check fails -> 2
    Json bad;
    bad["dim"] = 2;
    bad["check_ellipticity"] = Json{{"operator", operator_to_json(make_hyperbolic())}};
    write_config(dir / "hyperbolic.json", bad);
    RunOptions opt;
    opt.subcommand = "check-ellipticity";
    opt.config_path = (dir / "hyperbolic.json").string();
    opt.out_dir = (dir / "hyp_out").string();
    CHECK(run(opt) == 2);
    CHECK(parse_file(dir / "hyp_out" / "check_ellipticity.json").at("verdict") == "fail");

    // flat weight: the classical-solution hypothesis cannot be confirmed -> 3
    Json flat;
    flat["dim"] = 1;
    flat["weight"] = weight_to_json(RoFunction::log_power(0.0));
    flat["classical"] =
        Json{{"operator", operator_to_json(make_coupled())}, {"samples", 2}, {"bandwidth", 8}};
    write_config(dir / "flat.json", flat);
    opt.subcommand = "classical";
    opt.config_path = (dir / "flat.json").string();
    opt.out_dir = (dir / "flat_out").string();
    CHECK(run(opt) == 3);
    CHECK(parse_file(dir / "flat_out" / "classical_solution.json").at("verdict") ==
          "inconclusive");
}

TEST_CASE("driver: config problems exit 1") {
    const fs::path dir = fresh_dir("config_errors");
    RunOptions opt;
    opt.subcommand = "interp-check";
    opt.out_dir = (dir / "out").string();

    opt.config_path = (dir / "missing.json").string();
    CHECK(run(opt) == 1);  // no such file

    write_text_atomic(dir / "broken.json", "{not json");
    opt.config_path = (dir / "broken.json").string();
    CHECK(run(opt) == 1);  // invalid JSON

    Json config;
    config["dim"] = 1;
    config["weight"] = weight_to_json(RoFunction::log_power(1.0));
    config["interp_check"] = Json{{"s0", 0.0}, {"s1", 2.0}, {"bogus", 1}};
    write_config(dir / "unknown_field.json", config);
    opt.config_path = (dir / "unknown_field.json").string();
    CHECK(run(opt) == 1);  // unknown field in the section

    Json missing_section;
    missing_section["dim"] = 1;
    write_config(dir / "no_section.json", missing_section);
    opt.config_path = (dir / "no_section.json").string();
    CHECK(run(opt) == 1);

    opt.subcommand = "does-not-exist";
    CHECK(run(opt) == 1);

    // weight required somewhere: section without weight and no global weight
    Json no_weight;
    no_weight["dim"] = 1;
    no_weight["interp_check"] = Json{{"s0", 0.0}, {"s1", 2.0}};
    write_config(dir / "no_weight.json", no_weight);
    opt.subcommand = "interp-check";
    opt.config_path = (dir / "no_weight.json").string();
    CHECK(run(opt) == 1);
}

TEST_CASE("driver: incompatible data produces a failure report with the witness") {
    const fs::path dir = fresh_dir("incompatible");
    Json config;
    config["dim"] = 1;
    config["weight"] = weight_to_json(RoFunction::log_power(1.0));
    // constant right-hand side in the first component lies in the cokernel of
    // diag(D, D): no solution exists
    const TrigVector f(std::vector<TrigPoly>{TrigPoly::constant(1, 1.0), TrigPoly(1)});
    config["solve"] =
        Json{{"operator", operator_to_json(make_diag_dd())}, {"rhs", vector_to_json(f)}};
    write_config(dir / "config.json", config);

    RunOptions opt;
    opt.subcommand = "solve";
    opt.config_path = (dir / "config.json").string();
    opt.out_dir = (dir / "out").string();
    CHECK(run(opt) == 2);

    const Json doc = parse_file(dir / "out" / "solve.json");
    CHECK(doc.at("verdict") == "fail");
    CHECK(doc.at("constants").at("cokernel_overlap").get<double>() ==
          doctest::Approx(1.0).epsilon(1e-10));
    REQUIRE(doc.contains("violated_cokernel_vector"));
    const TrigVector witness = vector_from_json(doc.at("violated_cokernel_vector"), "witness");
    CHECK(witness.p() == 2);
    CHECK(std::abs(inner_product(f, witness)) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("driver: array sections write one numbered report per entry") {
    const fs::path dir = fresh_dir("multi");
    Json config;
    config["dim"] = 2;
    config["check_ellipticity"] =
        Json::array({Json{{"operator", operator_to_json(make_cauchy_riemann())}},
                     Json{{"operator", operator_to_json(make_hyperbolic())}}});
    write_config(dir / "config.json", config);

    RunOptions opt;
    opt.subcommand = "check-ellipticity";
    opt.config_path = (dir / "config.json").string();
    opt.out_dir = (dir / "out").string();
    opt.jobs = 4;  // exercises the worker pool (clamped to the entry count)
    CHECK(run(opt) == 2);

    CHECK(parse_file(dir / "out" / "check_ellipticity_0.json").at("verdict") == "pass");
    CHECK(parse_file(dir / "out" / "check_ellipticity_1.json").at("verdict") == "fail");
    CHECK(fs::exists(dir / "out" / "check_ellipticity_0.csv"));
}

TEST_CASE("every published subcommand is registered") {
    const std::vector<std::string>& names = subcommand_names();
    CHECK(names.size() == 11);
    for (const char* expected :
         {"check-ellipticity", "fredholm", "solve", "apriori", "regularity", "continuity",
          "classical", "interp-check", "embedding", "lemma41", "ro-info"})
        CHECK(std::find(names.begin(), names.end(), expected) != names.end());
}
