#include <algorithm>
#include <cctype>
#include <numbers>
#include <stdexcept>

#include "scsr/problems.hpp"

namespace scsr {

namespace fm {
namespace {

constexpr double pi = std::numbers::pi;

template <typename F>
Formula make_formula(F f)
{
    Formula out;
    out.eval = [f](std::span<double const> x) { return f(std::vector<double>(x.begin(), x.end())); };
    out.bound = [f](Box const& box) { return f(box); };
    out.derivative = [f](std::span<double const> x, int var) {
        std::vector<Dual<double>> d;
        for (std::size_t j = 0; j < x.size(); ++j) {
            d.push_back({x[j], static_cast<int>(j) == var ? 1.0 : 0.0});
        }
        return f(d).d;
    };
    out.derivative_bound = [f](Box const& box, int var) {
        std::vector<Dual<Interval>> d;
        for (std::size_t j = 0; j < box.size(); ++j) {
            d.push_back({box[j], Interval::point(static_cast<int>(j) == var ? 1.0 : 0.0)});
        }
        return f(d).d;
    };
    return out;
}

// air: gamma = 1.4, R = 287
double const kFuelFlowFactor = std::sqrt(1.4 / 287.0 * std::pow(2.0 / 2.4, 2.4 / 0.4));
constexpr double kAlpha0 = 2.0;

std::vector<Builtin> make_registry()
{
    auto box = [](std::initializer_list<std::pair<double, double>> r) {
        Box b;
        for (auto [lo, hi] : r) {
            b.push_back({lo, hi, true});
        }
        return b;
    };
    std::vector<Builtin> reg;

    reg.push_back({"Aircraft lift", "aircraft-lift", "CLa*(a + 2) + CLde*de*SHT/Sref",
        {"CLa", "a", "CLde", "de", "SHT", "Sref"},
        box({{0.3, 0.9}, {2, 12}, {0.3, 0.9}, {0, 12}, {0.5, 2}, {3, 10}}), {1, 1, 1, 1, 1, -1},
        make_formula([](auto const& x) { return x[0] * (x[1] + kAlpha0) + x[2] * x[3] * x[4] / x[5]; })});

    reg.push_back({"Flow psi", "flow-psi", "Vinf*r*sin(theta/(2 pi))*(1 - (R/r)^2) + Gamma/(2 pi)*log(r/R)",
        {"Vinf", "R", "Gamma", "r", "theta"}, box({{30, 100}, {0.1, 0.5}, {2, 15}, {0.5, 1.5}, {10, 90}}),
        {1, 1, 1, -1, 1}, make_formula([](auto const& x) {
            return x[0] * x[3] * sin(x[4] / (2 * pi)) * (1.0 - square(x[1] / x[3])) + x[2] / (2 * pi) * log(x[3] / x[1]);
        })});

    reg.push_back({"Fuel flow", "fuel-flow", "p0*A/sqrt(T0)*sqrt(gamma/R*(2/(1+gamma))^((gamma+1)/(gamma-1)))",
        {"A", "p0", "T0"}, box({{0.2, 2}, {3e5, 7e5}, {200, 400}}), {1, 1, -1},
        make_formula([](auto const& x) { return x[1] * x[0] / sqrt(x[2]) * kFuelFlowFactor; })});

    reg.push_back({"Jackson 2.11", "jackson-2.11", "q/(4 pi eps y^2)*(4 pi eps Volt d - q d y^3/(y^2 - d^2)^2)",
        {"q", "y", "Volt", "d", "eps"}, box({{1, 5}, {1, 3}, {1, 5}, {4, 6}, {1, 5}}), {1, -1, 1, 1, 1},
        make_formula([](auto const& x) {
            return x[0] / (4 * pi * x[4] * square(x[1]))
                * (4 * pi * x[4] * x[2] * x[3] - x[0] * x[3] * pow_int(x[1], 3) / square(square(x[1]) - square(x[3])));
        })});

    reg.push_back({"Wave power", "wave-power", "-32/5*G^4/c^5*(m1 m2)^2*(m1 + m2)/r^5", {"G", "c", "m1", "m2", "r"},
        box({{1, 2}, {1, 2}, {1, 5}, {1, 5}, {1, 2}}), {-1, 1, -1, -1, 1}, make_formula([](auto const& x) {
            return -32.0 / 5.0 * pow_int(x[0], 4) / pow_int(x[1], 5) * square(x[2] * x[3]) * (x[2] + x[3]) / pow_int(x[4], 5);
        })});

    reg.push_back({"I.6.20", "i.6.20", "exp(-(theta/sigma)^2/2)/(sqrt(2 pi) sigma)", {"sigma", "theta"},
        box({{1, 3}, {1, 3}}), {0, -1}, make_formula([](auto const& x) {
            return exp(-square(x[1] / x[0]) / 2.0) / (std::sqrt(2 * pi) * x[0]);
        })});

    reg.push_back({"I.9.18", "i.9.18", "G m1 m2/((x2 - x1)^2 + (y2 - y1)^2 + (z2 - z1)^2)",
        {"m1", "m2", "G", "x1", "x2", "y1", "y2", "z1", "z2"},
        box({{1, 2}, {1, 2}, {1, 2}, {3, 4}, {1, 2}, {3, 4}, {1, 2}, {3, 4}, {1, 2}}), {1, 1, 1, -1, 1, -1, 1, -1, 1},
        make_formula([](auto const& x) {
            return x[2] * x[0] * x[1] / (square(x[4] - x[3]) + square(x[6] - x[5]) + square(x[8] - x[7]));
        })});

    reg.push_back({"I.15.3x", "i.15.3x", "(x - u t)/sqrt(1 - u^2/c^2)", {"x", "u", "c", "t"},
        box({{5, 10}, {1, 2}, {3, 20}, {1, 2}}), {1, 0, -1, -1},
        make_formula([](auto const& x) { return (x[0] - x[1] * x[3]) / sqrt(1.0 - square(x[1] / x[2])); })});

    reg.push_back({"I.15.3t", "i.15.3t", "(t - u x/c^2)/sqrt(1 - u^2/c^2)", {"x", "c", "u", "t"},
        box({{1, 5}, {3, 10}, {1, 2}, {1, 5}}), {0, 0, 0, 1}, make_formula([](auto const& x) {
            return (x[3] - x[2] * x[0] / square(x[1])) / sqrt(1.0 - square(x[2] / x[1]));
        })});

    reg.push_back({"I.30.5", "i.30.5", "asin(lambd/(n d))", {"lambd", "d", "n"}, box({{1, 2}, {2, 5}, {1, 5}}),
        {1, -1, -1}, make_formula([](auto const& x) { return asin(x[0] / (x[2] * x[1])); })});

    reg.push_back({"I.32.17", "i.32.17", "1/2 eps c Ef^2 (8 pi r^2/3) omega^4/(omega^2 - omega0^2)^2",
        {"eps", "c", "Ef", "r", "omega", "omega0"}, box({{1, 2}, {1, 2}, {1, 2}, {1, 2}, {1, 2}, {3, 5}}),
        {1, 1, 1, 1, 1, -1}, make_formula([](auto const& x) {
            return 0.5 * x[0] * x[1] * square(x[2]) * (8 * pi * square(x[3]) / 3.0) * pow_int(x[4], 4)
                / square(square(x[4]) - square(x[5]));
        })});

    reg.push_back({"I.41.16", "i.41.16", "h omega^3/(pi^2 c^2 (exp(h omega/(kb T)) - 1))", {"omega", "T", "h", "kb", "c"},
        box({{1, 5}, {1, 5}, {1, 5}, {1, 5}, {1, 5}}), {0, 1, -1, 1, -1}, make_formula([](auto const& x) {
            return x[2] * pow_int(x[0], 3) / (pi * pi * square(x[4]) * (exp(x[2] * x[0] / (x[3] * x[1])) - 1.0));
        })});

    reg.push_back({"I.48.20", "i.48.20", "m c^2/sqrt(1 - v^2/c^2)", {"m", "v", "c"}, box({{1, 5}, {1, 2}, {3, 20}}),
        {1, 1, 1}, make_formula([](auto const& x) { return x[0] * square(x[2]) / sqrt(1.0 - square(x[1] / x[2])); })});

    reg.push_back({"II.6.15a", "ii.6.15a", "pd/(4 pi eps) 3 z/r^5 sqrt(x^2 + y^2)", {"eps", "pd", "r", "x", "y", "z"},
        box({{1, 3}, {1, 3}, {1, 3}, {1, 3}, {1, 3}, {1, 3}}), {-1, 1, -1, 1, 1, 1}, make_formula([](auto const& x) {
            return x[1] / (4 * pi * x[0]) * 3.0 * x[5] / pow_int(x[2], 5) * sqrt(square(x[3]) + square(x[4]));
        })});

    reg.push_back({"II.11.27", "ii.11.27", "n alpha/(1 - n alpha/3) eps Ef", {"n", "alpha", "eps", "Ef"},
        box({{0, 1}, {0, 1}, {1, 2}, {1, 2}}), {1, 1, 1, 1}, make_formula([](auto const& x) {
            return x[0] * x[1] / (1.0 - x[0] * x[1] / 3.0) * x[2] * x[3];
        })});

    reg.push_back({"II.11.28", "ii.11.28", "1 + n alpha/(1 - n alpha/3)", {"n", "alpha"}, box({{0, 1}, {0, 1}}), {1, 1},
        make_formula([](auto const& x) { return 1.0 + x[0] * x[1] / (1.0 - x[0] * x[1] / 3.0); })});

    reg.push_back({"II.35.21", "ii.35.21", "nrho mom tanh(mom B/(kb T))", {"nrho", "mom", "B", "kb", "T"},
        box({{1, 5}, {1, 5}, {1, 5}, {1, 5}, {1, 5}}), {1, 1, 1, -1, -1},
        make_formula([](auto const& x) { return x[0] * x[1] * tanh(x[1] * x[2] / (x[3] * x[4])); })});

    reg.push_back({"III.9.52", "iii.9.52", "pd Ef t/h sin((omega - omega0) t/2)^2/((omega - omega0) t/2)^2",
        {"pd", "Ef", "t", "h", "omega", "omega0"}, box({{1, 3}, {1, 3}, {1, 3}, {1, 3}, {1, 5}, {1, 5}}),
        {1, 1, 0, -1, 0, 0}, make_formula([](auto const& x) {
            auto const u = (x[4] - x[5]) * x[2] / 2.0;
            return x[0] * x[1] * x[2] / x[3] * square(sin(u)) / square(u);
        })});

    reg.push_back({"III.10.19", "iii.10.19", "mom sqrt(Bx^2 + By^2 + Bz^2)", {"mom", "Bx", "By", "Bz"},
        box({{1, 5}, {1, 5}, {1, 5}, {1, 5}}), {1, 1, 1, 1},
        make_formula([](auto const& x) { return x[0] * sqrt(square(x[1]) + square(x[2]) + square(x[3])); })});

    return reg;
}

} // namespace
} // namespace fm

namespace {

std::string lower(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::vector<RealWorldProblem> make_real_world()
{
    auto box = [](std::initializer_list<std::pair<double, double>> r) {
        Box b;
        for (auto [lo, hi] : r) {
            b.push_back({lo, hi, true});
        }
        return b;
    };
    return {
        {"Friction mu_dyn", "friction-dyn", {"p", "v", "T"}, "mu_dyn", box({{0.1, 15}, {0.01, 3}, {-50, 250}}), {-1, -1, -1}},
        {"Friction mu_stat", "friction-stat", {"p", "v", "T"}, "mu_stat", box({{0.1, 15}, {0.01, 3}, {-50, 250}}), {-1, 0, -1}},
        {"Flow stress", "flow-stress", {"phi", "phi_dot", "T"}, "sigma", box({{0, 1}, {0.001, 10}, {250, 600}}), {0, 1, -1}},
        // weight range taken from the data since the published domain omits it
        {"Cars", "cars", {"cyl", "dis", "hp", "w", "acc"}, "mpg",
            box({{3, 8}, {68, 455}, {46, 230}, {1613, 5140}, {8, 24.8}}), {0, -1, -1, -1, 0}},
    };
}

} // namespace

Eigen::ArrayXd FormulaModel::predict(Eigen::MatrixXd const& X) const
{
    Eigen::ArrayXd out(X.rows());
    std::vector<double> row(static_cast<std::size_t>(X.cols()));
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        Eigen::Map<Eigen::RowVectorXd>(row.data(), X.cols()) = X.row(i);
        out(i) = f_.eval(row);
    }
    return out;
}

Eigen::ArrayXd FormulaModel::partial(Eigen::MatrixXd const& X, int var, int order) const
{
    if (order != 1) {
        throw std::invalid_argument("benchmark formulas provide first-order derivatives only");
    }
    Eigen::ArrayXd out(X.rows());
    std::vector<double> row(static_cast<std::size_t>(X.cols()));
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        Eigen::Map<Eigen::RowVectorXd>(row.data(), X.cols()) = X.row(i);
        out(i) = f_.derivative(row, var);
    }
    return out;
}

Interval FormulaModel::partial_interval(Box const& box, int var, int order) const
{
    if (order != 1) {
        throw std::invalid_argument("benchmark formulas provide first-order derivatives only");
    }
    return f_.derivative_bound(box, var);
}

std::span<Builtin const> builtin_registry()
{
    static std::vector<Builtin> const reg = fm::make_registry();
    return reg;
}

Builtin const& find_builtin(std::string_view name)
{
    auto const key = lower(name);
    for (auto const& b : builtin_registry()) {
        if (lower(b.name) == key || b.slug == key) {
            return b;
        }
    }
    std::string names;
    for (auto const& b : builtin_registry()) {
        names += (names.empty() ? "" : ", ") + b.slug;
    }
    throw std::invalid_argument("unknown problem '" + std::string(name) + "'; available: " + names);
}

std::span<RealWorldProblem const> real_world_registry()
{
    static std::vector<RealWorldProblem> const reg = make_real_world();
    return reg;
}

} // namespace scsr
