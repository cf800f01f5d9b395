#include "holofib/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include "holofib/verify.hpp"

namespace holofib {

namespace {

using nlohmann::json;

json complex_to_json(Complex c) { return json::array({c.real(), c.imag()}); }

json cvec_to_json(const CVec& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
    return out;
}

json cmat_to_json(const CMat& m) {
    json out = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
        out.push_back(row);
    }
    return out;
}

Complex json_to_complex(const json& j) {
    if (!j.is_array() || j.size() != 2)
        throw Error("complex values are [re, im] pairs");
    return {j[0].get<double>(), j[1].get<double>()};
}

CVec json_to_cvec(const json& j) {
    if (!j.is_array()) throw Error("expected an array of [re, im] pairs");
    CVec v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) v(i) = json_to_complex(j[i]);
    return v;
}

Complex parse_complex(const std::string& text) {
    std::string s = text;
    if (!s.empty() && s.front() == '[') return json_to_complex(json::parse(s));
    if (s.empty()) throw Error("empty complex literal");
    if (s.back() != 'i' && s.back() != 'j') return {std::stod(s), 0.0};
    s.pop_back();
    if (s.empty() || s == "+") return {0.0, 1.0};
    if (s == "-") return {0.0, -1.0};
    for (std::size_t pos = s.size() - 1; pos >= 1; --pos) {
        char c = s[pos];
        if ((c == '+' || c == '-') && s[pos - 1] != 'e' && s[pos - 1] != 'E') {
            double re = std::stod(s.substr(0, pos));
            std::string im = s.substr(pos);
            if (im == "+") return {re, 1.0};
            if (im == "-") return {re, -1.0};
            return {re, std::stod(im)};
        }
    }
    return {0.0, std::stod(s)};
}

struct ChartPoint {
    CVec base;
    CVec fiber;
};

// Points are {"s": [...], "z": [...]}; the abelian family instead takes
// {"Pi": [[..]], "q": [...], "p": [...]} and evaluates in the chart centered
// at Pi (base offset w = 0).
struct FamilyContext {
    FamilyId id;
    std::string name;
};

ChartPoint parse_point(const FamilyContext& fam, const std::string& text,
                       std::optional<SiegelPoint>& pi_out) {
    json j = json::parse(text);
    if (fam.id.kind == FamilyKind::Abelian) {
        if (!j.contains("Pi") || !j.contains("q") || !j.contains("p"))
            throw Error("abelian points are {\"Pi\": [[..]], \"q\": [..], \"p\": [..]}");
        const json& pj = j["Pi"];
        int k = int(pj.size());
        CMat pi(k, k);
        for (int r = 0; r < k; ++r)
            for (int c = 0; c < k; ++c) pi(r, c) = json_to_complex(pj.at(r).at(c));
        pi_out = SiegelPoint(pi);
        CVec q = json_to_cvec(j["q"]), p = json_to_cvec(j["p"]);
        if (int(q.size()) != k || int(p.size()) != k)
            throw Error("abelian point: q and p must have length k");
        AbelianFamily family(k);
        CVec fiber(2 * k);
        fiber.head(k) = q;
        fiber.tail(k) = p;
        return {CVec::Zero(family.base_dim()), fiber};
    }
    if (!j.contains("s") || !j.contains("z"))
        throw Error("points are {\"s\": [[re,im],..], \"z\": [[re,im],..]}");
    return {json_to_cvec(j["s"]), json_to_cvec(j["z"])};
}

Connection10Spec family_connection(const FamilyContext& fam,
                                   const std::optional<SiegelPoint>& pi) {
    switch (fam.id.kind) {
        case FamilyKind::Incomplete: return IncompleteFamily().conn;
        case FamilyKind::DiskNonholomorphic: return DiskFamily().conn;
        case FamilyKind::FlatQuotient: return FlatQuotientFamily(fam.id.lambda).conn;
        case FamilyKind::HermitianLineGaussian:
            return chern_connection_spec(gaussian_line_bundle());
        case FamilyKind::Abelian: {
            if (!pi) throw Error("abelian connection needs a Pi value from the point");
            return AbelianFamily(fam.id.k).gm_connection(*pi);
        }
    }
    throw UnknownFamily("unhandled family");
}

json tensor_to_json(const MixedTensor& t) {
    auto role_name = [](IndexRole r) {
        switch (r) {
            case IndexRole::FiberHol: return "fiber-hol";
            case IndexRole::FiberAntihol: return "fiber-antihol";
            case IndexRole::BaseHol: return "base-hol";
            case IndexRole::BaseAntihol: return "base-antihol";
        }
        return "?";
    };
    json sig = json::array();
    json dims = json::array();
    for (int r = 0; r < t.rank(); ++r) {
        sig.push_back(role_name(t.signature()[r]));
        dims.push_back(t.dim(r));
    }
    json values = json::array();
    if (t.rank() == 2) {
        for (int a = 0; a < t.dim(0); ++a)
            for (int b = 0; b < t.dim(1); ++b)
                values.push_back(json{{"index", {a, b}}, {"value", complex_to_json(t.at({a, b}))}});
    } else {
        for (int a = 0; a < t.dim(0); ++a)
            for (int b = 0; b < t.dim(1); ++b)
                for (int c = 0; c < t.dim(2); ++c)
                    values.push_back(
                        json{{"index", {a, b, c}}, {"value", complex_to_json(t.at({a, b, c}))}});
    }
    return json{{"signature", sig}, {"dims", dims}, {"values", values}};
}

int cmd_verify(const std::string& family, int samples, std::uint64_t seed,
               const std::string& json_path, std::ostream& out, std::ostream& err) {
    SuiteConfig config;
    config.family = family;
    config.samples = samples;
    config.seed = seed;
    VerificationReport report = run_suite(config);
    std::string text = report_serialize(report, true);
    if (!json_path.empty()) {
        std::ofstream f(json_path);
        if (!f) {
            err << "error: cannot write " << json_path << "\n";
            return 2;
        }
        f << text;
    }
    out << text;
    return report.pass ? 0 : 1;
}

int cmd_curvature(const FamilyContext& fam, const std::string& point_text,
                  const std::string& kind, std::ostream& out) {
    std::optional<SiegelPoint> pi;
    ChartPoint pt = parse_point(fam, point_text, pi);
    json result;
    result["family"] = fam.name;
    result["kind"] = kind;
    if (kind == "f11") {
        Connection10Spec conn = family_connection(fam, pi);
        DbarSpec dbar = DbarSpec::canonical(conn.chart);
        result["tensor"] = tensor_to_json(curvature_f11(conn, dbar, pt.base, pt.fiber));
    } else if (kind == "f20") {
        Connection10Spec conn = family_connection(fam, pi);
        result["tensor"] = tensor_to_json(curvature_f20(conn, pt.base, pt.fiber));
    } else if (kind == "ks") {
        Connection10Spec conn = family_connection(fam, pi);
        result["tensor"] = tensor_to_json(ks_tensor(conn, pt.base, pt.fiber));
    } else if (kind == "g11") {
        if (fam.id.kind != FamilyKind::Abelian)
            throw Error("g11 needs a built-in Higgs field; only the abelian family has one");
        AbelianFamily family(fam.id.k);
        HiggsSpec higgs = family.ks_higgs_spec(*pi);
        DbarSpec dbar = family.canonical_dbar(*pi);
        result["tensor"] = tensor_to_json(pseudo_curvature_g11(higgs, dbar, pt.base, pt.fiber));
    } else {
        throw Error("unknown --kind (expected f11|f20|g11|ks): " + kind);
    }
    out << result.dump(2) << "\n";
    return 0;
}

BasePath family_default_path(const FamilyContext& fam) {
    switch (fam.id.kind) {
        case FamilyKind::Incomplete: return IncompleteFamily().unit_path();
        case FamilyKind::DiskNonholomorphic: return DiskFamily().real_path(1.0);
        case FamilyKind::FlatQuotient: return FlatQuotientFamily(fam.id.lambda).standard_loop();
        case FamilyKind::HermitianLineGaussian: {
            CVec a = CVec::Zero(1), b(1);
            b(0) = 1.0;
            return BasePath::line(a, b);
        }
        case FamilyKind::Abelian: {
            AbelianFamily family(fam.id.k);
            CVec dir = CVec::Zero(family.base_dim());
            dir(0) = 1.0;
            return BasePath::loop(CVec::Zero(family.base_dim()), dir, 0.02);
        }
    }
    throw UnknownFamily("unhandled family");
}

BasePath parse_path(const FamilyContext& fam, const std::string& text) {
    if (text.empty() || text == "default") return family_default_path(fam);
    json j = json::parse(text);
    if (j.contains("from") && j.contains("to"))
        return BasePath::line(json_to_cvec(j["from"]), json_to_cvec(j["to"]));
    if (j.contains("loop")) {
        const json& l = j["loop"];
        return BasePath::loop(json_to_cvec(l.at("center")), json_to_cvec(l.at("dir")),
                              l.at("radius").get<double>(),
                              l.contains("turns") ? l.at("turns").get<int>() : 1);
    }
    throw Error("path JSON must contain {\"from\",\"to\"} or {\"loop\": {...}}");
}

CVec parse_z0(const std::string& text, int m) {
    if (!text.empty() && text.front() == '[') {
        json j = json::parse(text);
        // either one [re,im] pair or an array of them
        if (j.size() == 2 && j[0].is_number()) {
            CVec v(1);
            v(0) = json_to_complex(j);
            return v;
        }
        return json_to_cvec(j);
    }
    CVec v(1);
    v(0) = parse_complex(text);
    if (m != 1) throw Error("fiber dimension > 1: pass --z0 as [[re,im],...]");
    return v;
}

int cmd_transport(const FamilyContext& fam, const std::string& path_text,
                  const std::string& z0_text, const std::string& csv_path, double step,
                  std::ostream& out, std::ostream& err) {
    if (fam.id.kind == FamilyKind::Abelian)
        throw Error("transport on the abelian family runs through `verify`; "
                    "use a generic family here");
    Connection10Spec conn = family_connection(fam, std::nullopt);
    BasePath path = parse_path(fam, path_text);
    CVec z0 = parse_z0(z0_text, conn.chart.m);
    TransportOptions opt;
    if (step > 0) opt.step = step;
    TransportResult res = horizontal_lift(conn, path, z0, opt);

    std::ostringstream csv;
    csv << "t";
    for (int a = 0; a < conn.chart.m; ++a) csv << ",re_z" << (a + 1) << ",im_z" << (a + 1);
    csv << "\n";
    for (const auto& [t, z] : res.trajectory) {
        csv << t;
        for (int a = 0; a < conn.chart.m; ++a)
            csv << "," << z(a).real() << "," << z(a).imag();
        csv << "\n";
    }

    auto status_name = [](TransportStatus s) {
        switch (s) {
            case TransportStatus::Completed: return "completed";
            case TransportStatus::BlewUp: return "blew-up";
            case TransportStatus::StepLimitReached: return "step-limit-reached";
        }
        return "?";
    };
    if (!csv_path.empty()) {
        std::ofstream f(csv_path);
        if (!f) {
            err << "error: cannot write " << csv_path << "\n";
            return 2;
        }
        f << csv.str();
        json summary{{"status", status_name(res.status)},
                     {"endpoint", cvec_to_json(res.endpoint)},
                     {"csv", csv_path}};
        if (res.status == TransportStatus::BlewUp) summary["blowup_time"] = res.blowup_time;
        out << summary.dump(2) << "\n";
    } else {
        out << csv.str();
    }
    return 0;
}

int cmd_monodromy(const FamilyContext& fam, int loops, std::uint64_t seed, std::ostream& out) {
    if (fam.id.kind != FamilyKind::FlatQuotient)
        throw Error("monodromy is wired for flat-quotient families");
    FlatQuotientFamily family(fam.id.lambda);
    Rng rng(derive_seed(seed, "cli-monodromy"));
    std::vector<CVec> zs;
    for (int i = 0; i < 6; ++i) {
        CVec z(1);
        z(0) = rng.complex_box(1.5);
        if (std::abs(z(0)) < 0.1) z(0) += 1.0;
        zs.push_back(z);
    }
    std::vector<CVec> ends = monodromy(family.conn, family.standard_loop(loops), zs);
    Complex mult = family.expected_multiplier(loops);
    double defect = 0;
    json samples = json::array();
    for (std::size_t i = 0; i < zs.size(); ++i) {
        defect = std::max(defect, std::abs(ends[i](0) - mult * zs[i](0)));
        samples.push_back(json{{"z0", complex_to_json(zs[i](0))},
                               {"endpoint", complex_to_json(ends[i](0))}});
    }
    json result{{"family", fam.name},
                {"loops", loops},
                {"expected_multiplier", complex_to_json(mult)},
                {"max_defect", defect},
                {"samples", samples},
                {"pass", defect <= 1e-6}};
    out << result.dump(2) << "\n";
    return defect <= 1e-6 ? 0 : 1;
}

int cmd_simpson(const FamilyContext& fam, const std::string& direction,
                const std::string& point_text, std::ostream& out) {
    if (fam.id.kind != FamilyKind::Abelian)
        throw Error("the simpson command is wired for abelian families");
    std::optional<SiegelPoint> pi;
    ChartPoint pt = parse_point(fam, point_text, pi);
    AbelianFamily family(fam.id.k);
    const int k = family.k(), n = family.base_dim(), m = family.fiber_dim();
    CVec q = pt.fiber.head(k), p = pt.fiber.tail(k);
    FiberFrame fr = family.hyperkahler_frame(*pi);

    // coefficient matrices over (q,p) mod conjugate-vertical directions
    CMat partial_flat(m, n), partial_chern(m, n), dbar_flat(m, n), theta_ks(m, n);
    for (int d = 0; d < n; ++d) {
        auto [i, j] = family.index_pair(d);
        AbelianFamily::Vertical gm = family.gauss_manin_lift(*pi, q, p, i, j);
        partial_flat.col(d).head(k) = gm.dq;
        partial_flat.col(d).tail(k) = gm.dp;
        AbelianFamily::Vertical sy = family.symplectic_connection(*pi, p, i, j);
        partial_chern.col(d).head(k) = sy.dq;
        partial_chern.col(d).tail(k) = sy.dp;
        AbelianFamily::Vertical off = family.dbar_offset(*pi, p, i, j);
        dbar_flat.col(d).head(k) = off.dq;
        dbar_flat.col(d).tail(k) = off.dp;
        AbelianFamily::Vertical ks = family.kodaira_spencer_higgs(p, i, j);
        theta_ks.col(d).head(k) = ks.dq;
        theta_ks.col(d).tail(k) = ks.dp;
    }
    ConjRule rule = [&family, &fr, k, m](const CMat& th) {
        CMat out2(m, th.cols());
        for (int d = 0; d < th.cols(); ++d) {
            AbelianFamily::Vertical v = family.zero_vertical();
            v.dq = th.col(d).head(k);
            v.dp = th.col(d).tail(k);
            CVec tb = theta_bar_J(fr, family.vertical_to_frame(v));
            AbelianFamily::Vertical vb = family.frame_to_vertical(tb);
            out2.col(d).head(k) = vb.dq;
            out2.col(d).tail(k) = vb.dp;
        }
        return out2;
    };

    json result;
    result["family"] = fam.name;
    result["direction"] = direction;
    if (direction == "flat-to-higgs") {
        HiggsSideValue hv = simpson_flat_to_higgs(partial_flat, partial_chern, rule, dbar_flat);
        result["theta"] = cmat_to_json(hv.theta);
        result["dbar"] = cmat_to_json(hv.dbar);
    } else if (direction == "higgs-to-flat") {
        CMat dbar_higgs = CMat::Zero(m, n); // canonical dbar_B
        FlatSideValue fv = simpson_higgs_to_flat(dbar_higgs, theta_ks, partial_chern, rule);
        result["dbar"] = cmat_to_json(fv.dbar);
        result["partial"] = cmat_to_json(fv.partial);
    } else {
        throw Error("unknown --direction (expected flat-to-higgs|higgs-to-flat): " + direction);
    }
    out << result.dump(2) << "\n";
    return 0;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"numerical toolkit for fiber bundles in adapted coordinates"};
    app.require_subcommand(1);

    std::string family, point_text, kind = "ks", path_text, z0_text, csv_path, json_path;
    std::string direction = "flat-to-higgs";
    int samples = 50, loops = 1;
    std::uint64_t seed = 1;
    double step = 0;

    CLI::App* verify = app.add_subcommand("verify", "run a family verification suite");
    verify->add_option("--family", family)->required();
    verify->add_option("--samples", samples);
    verify->add_option("--seed", seed);
    verify->add_option("--json", json_path);

    CLI::App* curvature = app.add_subcommand("curvature", "evaluate a tensor at a point");
    curvature->add_option("--family", family)->required();
    curvature->add_option("--point", point_text)->required();
    curvature->add_option("--kind", kind)->required();

    CLI::App* transport = app.add_subcommand("transport", "integrate a horizontal lift");
    transport->add_option("--family", family)->required();
    transport->add_option("--path", path_text);
    transport->add_option("--z0", z0_text)->required();
    transport->add_option("--csv", csv_path);
    transport->add_option("--step", step);

    CLI::App* monodromy_cmd = app.add_subcommand("monodromy", "sampled loop transport map");
    monodromy_cmd->add_option("--family", family)->required();
    monodromy_cmd->add_option("--loops", loops);
    monodromy_cmd->add_option("--seed", seed);

    CLI::App* simpson_cmd = app.add_subcommand("simpson", "run a mechanism transform");
    simpson_cmd->add_option("--family", family)->required();
    simpson_cmd->add_option("--direction", direction)->required();
    simpson_cmd->add_option("--point", point_text)->required();

    std::vector<char*> argv;
    std::vector<std::string> copy = args;
    for (std::string& a : copy) argv.push_back(a.data());
    try {
        app.parse(int(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            // --help and friends
            out << app.help();
            return 0;
        }
        err << "usage error: " << e.what() << "\n";
        return 2;
    }

    if (const char* env_seed = std::getenv("GEOM_SEED")) {
        try {
            seed = std::stoull(env_seed);
        } catch (const std::exception&) {
            err << "error: GEOM_SEED must be an unsigned integer\n";
            return 2;
        }
    }

    try {
        FamilyContext fam{parse_family_id(family), family};
        if (verify->parsed()) return cmd_verify(family, samples, seed, json_path, out, err);
        if (curvature->parsed()) return cmd_curvature(fam, point_text, kind, out);
        if (transport->parsed())
            return cmd_transport(fam, path_text, z0_text, csv_path, step, out, err);
        if (monodromy_cmd->parsed()) return cmd_monodromy(fam, loops, seed, out);
        if (simpson_cmd->parsed()) return cmd_simpson(fam, direction, point_text, out);
        err << "usage error: no subcommand\n";
        return 2;
    } catch (const json::exception& e) {
        err << "error: invalid JSON input: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

} // namespace holofib
