// Acceptance run: one PASS/FAIL line per criterion, thresholds fixed here
// rather than taken from the reports.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "spintop/cli.hpp"

using nlohmann::json;

namespace {

struct Output {
    int code;
    std::string text;
    double seconds;
};

Output invoke(const std::vector<std::string> &args)
{
    std::ostringstream out, err;
    const auto t0 = std::chrono::steady_clock::now();
    const int code = spintop::cli::run(args, out, err);
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (code != 0) {
        std::fprintf(stderr, "'%s' exited with %d: %s\n", args.front().c_str(), code, err.str().c_str());
    }
    return {code, out.str(), s};
}

std::map<std::string, json> checks_of(const Output &o)
{
    std::map<std::string, json> m;
    const json report = json::parse(o.text);
    for (const auto &c : report["checks"]) {
        m[c["name"].get<std::string>()] = c;
    }
    return m;
}

double measured(const std::map<std::string, json> &checks, const std::string &name)
{
    const auto it = checks.find(name);
    if (it == checks.end() || !it->second["measured"].is_number()) {
        return INFINITY;
    }
    return it->second["measured"].get<double>();
}

struct Line {
    std::string label;
    bool ok;
    std::string detail;
};

std::string fmt(const char *f, double a)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

} // namespace

int main()
{
    std::vector<Line> lines;
    auto report = [&](int n, const std::string &label, const std::function<Line()> &f) {
        Line l;
        try {
            l = f();
        } catch (const std::exception &e) {
            l = {label, false, std::string("exception: ") + e.what()};
        }
        l.label = std::to_string(n) + " " + label;
        lines.push_back(l);
        std::printf("%s  %-38s %s\n", l.ok ? "PASS" : "FAIL", l.label.c_str(), l.detail.c_str());
        std::fflush(stdout);
    };

    const Output vc = invoke({"verify"});
    const Output vn = invoke({"verify", "--variant", "noncompact"});
    const auto cc = checks_of(vc);
    const auto cn = checks_of(vn);

    report(1, "triple oracle over one period", [&] {
        const Output s = invoke({"solve", "--t-steps", "129", "--format", "json"});
        const double solve_err = json::parse(s.text)["metadata"]["max_pairwise_err"].get<double>();
        const double err = std::max(solve_err, measured(cc, "triple_oracle"));
        return Line{"", err < 1e-6 && s.seconds < 10.0,
                    fmt("max pairwise %.3g", err) + fmt(" (< 1e-6), %.3f s (< 10 s)", s.seconds)};
    });

    report(2, "factorization residual", [&] {
        const double err = measured(cc, "factorization");
        return Line{"", err < 1e-6 && vc.seconds < 30.0,
                    fmt("rel Frobenius %.3g (< 1e-6), ", err) + fmt("%.2f s (< 30 s)", vc.seconds)};
    });

    report(3, "conjugation evolution", [&] {
        const double err = measured(cc, "conjugation");
        return Line{"", err < 1e-6, fmt("max entrywise %.3g (< 1e-6)", err)};
    });

    report(4, "velocity identity over energies", [&] {
        double b = 0, r = 0;
        bool ran = true;
        for (const char *e : {"1.5", "2", "3", "5", "10"}) {
            for (const char *variant : {"compact", "noncompact"}) {
                const Output o = invoke({"curve", "--variant", variant, "--energy", e});
                ran = ran && o.code == 0;
                const json id = json::parse(o.text)["identities"];
                b = std::max(b, id["v_b_period_rel"].get<double>());
                r = std::max(r, id["v_residue_rel"].get<double>());
            }
        }
        return Line{"", ran && b < 1e-9 && r < 1e-8,
                    fmt("|V-2a alpha|/|V| %.3g (< 1e-9), ", b) + fmt("residue %.3g (< 1e-8)", r)};
    });

    report(5, "theta and wp infrastructure", [&] {
        double q = 0, l = 0, s = 0;
        for (const auto *c : {&cc, &cn}) {
            q = std::max(q, measured(*c, "quasi_periodicity"));
            l = std::max(l, measured(*c, "wp_lattice"));
            s = std::max(s, measured(*c, "wp_scaling"));
        }
        return Line{"", q < 1e-13 && l < 1e-8 && s < 1e-9,
                    fmt("quasi %.3g (< 1e-13), ", q) + fmt("lattice %.3g (< 1e-8), ", l)
                        + fmt("scaling %.3g (< 1e-9)", s)};
    });

    report(6, "Baker-Akhiezer conditions", [&] {
        double m = 0, d = 0, e = 0;
        for (const auto *c : {&cc, &cn}) {
            m = std::max(m, measured(*c, "ba_no_monodromy"));
            d = std::max(d, measured(*c, "ba_residue_constancy"));
            e = std::max(e, measured(*c, "ba_eigenvector"));
        }
        return Line{"", m < 1e-8 && d < 1e-8 && e < 1e-7,
                    fmt("monodromy %.3g (< 1e-8), ", m) + fmt("d_j drift %.3g (< 1e-8), ", d)
                        + fmt("eigenvector %.3g (< 1e-7)", e)};
    });

    report(7, "non-compact blow-up", [&] {
        const Output s = invoke({"solve", "--variant", "noncompact", "--format", "json"});
        const json m = json::parse(s.text)["metadata"];
        const double gap = std::abs(m["blowup_time"].get<double>() - m["blowup_time_u0"].get<double>());
        const double err = std::max(gap, measured(cn, "blowup"));
        const bool flip = cn.count("classification_flip") && cn.at("classification_flip")["pass"].get<bool>();
        return Line{"", err < 1e-4 && flip && vn.seconds < 10.0,
                    fmt("|t* - u0/2a| %.3g (< 1e-4), ", err) + (flip ? "flips, " : "no flip, ")
                        + fmt("%.2f s (< 10 s)", vn.seconds)};
    });

    report(8, "isospectrality and conservation", [&] {
        double d = 0;
        for (const auto *c : {&cc, &cn}) {
            d = std::max(d, measured(*c, "det_drift"));
        }
        const double e = measured(cc, "energy_drift");
        return Line{"", d < 1e-8 && e < 1e-9,
                    fmt("det L drift %.3g (< 1e-8), ", d) + fmt("energy drift over 5 periods %.3g (< 1e-9)", e)};
    });

    report(9, "deterministic verify report", [&] {
        const Output again = invoke({"verify"});
        const Output again_n = invoke({"verify", "--variant", "noncompact"});
        const bool same = again.text == vc.text && again_n.text == vn.text && !vc.text.empty();
        return Line{"", same, same ? "byte-identical" : "reports differ"};
    });

    int failed = 0;
    for (const auto &l : lines) {
        failed += l.ok ? 0 : 1;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(lines.size()) - failed, lines.size());
    return failed == 0 ? 0 : 1;
}
