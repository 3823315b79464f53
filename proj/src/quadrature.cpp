#include "levy/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

namespace levy::quad {
namespace {

// Kronrod abscissae on [0, 1]; odd indices are the Gauss-7 nodes.
constexpr std::array<double, 8> xgk = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
};

constexpr std::array<double, 8> wgk = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
};

constexpr std::array<double, 4> wg = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
};

struct Segment
{
    double a;
    double b;
    Estimate est;
};

bool smaller_error(Segment const& lhs, Segment const& rhs)
{
    return lhs.est.error < rhs.est.error;
}

}  // namespace

Estimate kronrod15(std::function<double(double)> const& f, double a, double b)
{
    double const center = 0.5 * (a + b);
    double const half = 0.5 * (b - a);

    double const fc = f(center);
    double kronrod = fc * wgk[7];
    double gauss = fc * wg[3];
    for (std::size_t j = 0; j < 7; ++j)
    {
        double const dx = half * xgk[j];
        double const sum = f(center - dx) + f(center + dx);
        kronrod += wgk[j] * sum;
        if (j % 2 == 1)
            gauss += wg[j / 2] * sum;
    }
    Estimate out;
    out.value = kronrod * half;
    out.error = std::abs((kronrod - gauss) * half);
    out.evaluations = 15;
    return out;
}

Estimate integrate(std::function<double(double)> const& f,
                   double a,
                   double b,
                   double abs_tol,
                   std::size_t max_intervals)
{
    std::vector<Segment> heap;
    heap.push_back({a, b, kronrod15(f, a, b)});
    double error = heap.front().est.error;
    std::size_t evaluations = 15;

    while (error > abs_tol && heap.size() < max_intervals)
    {
        std::pop_heap(heap.begin(), heap.end(), smaller_error);
        Segment worst = heap.back();
        heap.pop_back();

        double const mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b))
        {
            // Cannot split further in floating point.
            heap.push_back(worst);
            std::push_heap(heap.begin(), heap.end(), smaller_error);
            break;
        }
        Segment left{worst.a, mid, kronrod15(f, worst.a, mid)};
        Segment right{mid, worst.b, kronrod15(f, mid, worst.b)};
        evaluations += 30;

        error += left.est.error + right.est.error - worst.est.error;

        heap.push_back(left);
        std::push_heap(heap.begin(), heap.end(), smaller_error);
        heap.push_back(right);
        std::push_heap(heap.begin(), heap.end(), smaller_error);
    }

    // Re-sum to shed the drift of the running updates.
    Estimate out;
    for (auto const& s : heap)
    {
        out.value += s.est.value;
        out.error += s.est.error;
    }
    out.evaluations = evaluations;
    out.converged = out.error <= abs_tol;
    return out;
}

}  // namespace levy::quad
