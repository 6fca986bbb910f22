#include "heatlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "heatlab/common.hpp"

namespace heatlab {

const GaussRule& gauss_legendre(int n) {
    static std::map<int, GaussRule> cache;
    static std::mutex mutex;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(3.14159265358979323846 * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / pp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
        rule.weights[n - 1 - i] = rule.weights[i];
    }
    return cache.emplace(n, std::move(rule)).first->second;
}

namespace {

// G7K15 nodes: abscissa, Gauss weight, Kronrod weight
constexpr double kGk[8][3] = {
    {0.000000000000000, 0.417959183673469, 0.209482141084728},
    {0.405845151377397, 0.381830050505119, 0.190350578064785},
    {0.741531185599394, 0.279705391489277, 0.140653259715525},
    {0.949107912342759, 0.129484966168870, 0.063092092629979},
    {0.207784955007898, 0.0, 0.204432940075298},
    {0.586087235467691, 0.0, 0.169004726639267},
    {0.864864423359769, 0.0, 0.104790010322250},
    {0.991455371120813, 0.0, 0.022935322010529},
};

struct Panel {
    double a, b, value, error;
};

Panel eval_panel(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double y0 = f(c);
    double g = kGk[0][1] * y0;
    double k = kGk[0][2] * y0;
    for (int i = 1; i < 8; ++i) {
        double dx = h * kGk[i][0];
        double yi = f(c + dx) + f(c - dx);
        g += kGk[i][1] * yi;
        k += kGk[i][2] * yi;
    }
    g *= h;
    k *= h;
    double err = std::fabs(g - k);
    err = 200.0 * err * std::sqrt(std::max(err, 0.0));
    return {a, b, k, std::max(err, std::fabs(k) * 1e-16)};
}

} // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol, double rel_tol, const std::vector<double>& breaks) {
    std::vector<double> pts{a, b};
    for (double p : breaks)
        if (p > a && p < b) pts.push_back(p);
    std::sort(pts.begin(), pts.end());

    std::vector<Panel> panels;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        panels.push_back(eval_panel(f, pts[i], pts[i + 1]));

    const std::size_t max_panels = 4000;
    for (;;) {
        double total = 0.0, err = 0.0;
        std::size_t worst = 0;
        for (std::size_t i = 0; i < panels.size(); ++i) {
            total += panels[i].value;
            err += panels[i].error;
            if (panels[i].error > panels[worst].error) worst = i;
        }
        if (err <= abs_tol || err <= rel_tol * std::fabs(total)) return total;
        if (panels.size() >= max_panels)
            throw Error("integrate: panel budget exhausted (error " + std::to_string(err) + ")");
        Panel p = panels[worst];
        double mid = 0.5 * (p.a + p.b);
        panels[worst] = eval_panel(f, p.a, mid);
        panels.push_back(eval_panel(f, mid, p.b));
    }
}

} // namespace heatlab
