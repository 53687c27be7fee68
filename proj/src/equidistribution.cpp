#include "akc/equidistribution.hpp"

#include "akc/kernels.hpp"

#include <boost/math/distributions/normal.hpp>

#include <array>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <tuple>

namespace akc {

namespace {

constexpr std::uint64_t kReferenceSeed = 0x5eed1ebe5ull;

std::mutex& cache_mutex()
{
    static std::mutex m;
    return m;
}

std::shared_ptr<const SortedCloud> load_cached(const std::filesystem::path& file, int d, std::size_t n)
{
    std::ifstream in(file, std::ios::binary);
    if (!in)
        return nullptr;
    std::int64_t hdr[3] = {};
    in.read(reinterpret_cast<char*>(hdr), sizeof hdr);
    if (!in || hdr[0] != d || hdr[1] != static_cast<std::int64_t>(n)
        || hdr[2] != static_cast<std::int64_t>(kReferenceSeed))
        return nullptr;
    auto out = std::make_shared<SortedCloud>();
    out->dim = 2 * d;
    out->x.resize(n * out->dim);
    in.read(reinterpret_cast<char*>(out->x.data()), static_cast<std::streamsize>(out->x.size() * sizeof(double)));
    if (!in)
        return nullptr;
    out->key.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        out->key[i] = out->x[i * out->dim];
    return out;
}

void store_cached(const std::filesystem::path& file, const SortedCloud& c, int d)
{
    std::error_code ec;
    std::filesystem::create_directories(file.parent_path(), ec);
    auto tmp = file;
    tmp += ".tmp";
    std::ofstream out(tmp, std::ios::binary);
    if (!out)
        return;
    std::int64_t hdr[3] = {d, static_cast<std::int64_t>(c.size()), static_cast<std::int64_t>(kReferenceSeed)};
    out.write(reinterpret_cast<const char*>(hdr), sizeof hdr);
    out.write(reinterpret_cast<const char*>(c.x.data()), static_cast<std::streamsize>(c.x.size() * sizeof(double)));
    out.close();
    if (out)
        std::filesystem::rename(tmp, file, ec);
}

// Lebesgue counts for a given ball family, shared by every CUD test that uses it.
std::vector<std::size_t> lebesgue_counts(int d, const PointCloud& centers, double eps, std::size_t nballs,
                                         std::uint64_t seed)
{
    using Key = std::tuple<int, double, std::size_t, std::uint64_t>;
    static std::map<Key, std::vector<std::size_t>> cache;
    Key key{d, eps, nballs, seed};
    {
        std::lock_guard lock(cache_mutex());
        if (auto it = cache.find(key); it != cache.end())
            return it->second;
    }
    auto ref = lebesgue_reference(d);
    auto counts = count_in_balls(*ref, centers, eps);
    std::lock_guard lock(cache_mutex());
    cache.emplace(key, counts);
    return counts;
}

std::vector<double> row(const PointCloud& c, std::size_t i)
{
    return {c.at(i), c.at(i) + c.dim};
}

std::size_t finite_count(const PointCloud& c)
{
    std::size_t n = 0;
    for (std::size_t i = 0; i < c.size(); ++i)
        n += std::isfinite(c.at(i)[0]) ? 1 : 0;
    return n;
}

}  // namespace

std::size_t lebesgue_reference_size(int d)
{
    std::size_t n = 1000000;
    for (int k = 2; k < d && n > 100000; ++k)
        n /= 2;
    return n;
}

std::shared_ptr<const SortedCloud> lebesgue_reference(int d)
{
    static std::map<int, std::shared_ptr<const SortedCloud>> mem;
    {
        std::lock_guard lock(cache_mutex());
        if (auto it = mem.find(d); it != mem.end())
            return it->second;
    }
    const std::size_t n = lebesgue_reference_size(d);
    std::shared_ptr<const SortedCloud> out;
    std::filesystem::path file;
    if (const char* dir = std::getenv("AKC_CACHE_DIR"); dir && *dir) {
        file = std::filesystem::path(dir) / ("lebesgue_d" + std::to_string(d) + "_n" + std::to_string(n) + ".bin");
        out = load_cached(file, d, n);
    }
    if (!out) {
        auto sorted = std::make_shared<SortedCloud>(sort_cloud(lebesgue_cloud(d, n, kReferenceSeed)));
        if (!file.empty())
            store_cached(file, *sorted, d);
        out = sorted;
    }
    std::lock_guard lock(cache_mutex());
    mem.emplace(d, out);
    return out;
}

DistributionReport test_CUD(const PointCloud& orbit, double C, double eps, std::size_t nballs,
                            std::uint64_t seed)
{
    if (orbit.size() == 0)
        throw PreconditionError("empty orbit");
    if (!(C > 1.0) || !(eps > 0.0) || nballs == 0)
        throw PreconditionError("test_CUD needs C > 1, eps > 0, nballs >= 1");
    const int d = orbit.dim / 2;
    DistributionReport rep;
    rep.test = "cud";
    rep.C = C;
    rep.eps = eps;
    rep.nballs = nballs;
    rep.seed = seed;

    PointCloud centers = lebesgue_cloud(d, nballs, seed);
    auto ref_counts = lebesgue_counts(d, centers, eps, nballs, seed);
    const double nref = static_cast<double>(lebesgue_reference_size(d));
    auto sorted = sort_cloud(orbit);
    auto counts = count_in_balls(sorted, centers, eps);
    const double norb = static_cast<double>(orbit.size());
    rep.orbit_count = orbit.size();
    rep.reference_count = lebesgue_reference_size(d);

    rep.pass = true;
    rep.worst_ratio = -1;
    for (std::size_t b = 0; b < nballs; ++b) {
        BallStat s;
        s.center = row(centers, b);
        s.radius = eps;
        s.observed = static_cast<double>(counts[b]) / norb;
        s.expected = static_cast<double>(ref_counts[b]) / nref;
        s.allowance = std::sqrt(s.expected * (1 - s.expected) / nref);
        if (s.expected <= 0 || s.allowance > (C - 1) * s.expected / 10)
            rep.inconclusive = true;
        s.ok = s.expected / C < s.observed && s.observed < C * s.expected;
        double ratio = s.observed > 0 && s.expected > 0
                           ? std::max(s.observed / s.expected, s.expected / s.observed)
                           : std::numeric_limits<double>::infinity();
        if (!s.ok)
            rep.pass = false;
        if (ratio > rep.worst_ratio) {
            rep.worst_ratio = ratio;
            rep.worst = s;
        }
        rep.balls.push_back(std::move(s));
    }
    return rep;
}

PointCloud reference_cloud(const SpherePoint& y, std::span<const Axis> dirs, std::size_t count,
                           std::uint64_t seed)
{
    const int d = y.dim();
    for (const auto& a : dirs)
        a.validate(d);
    PointCloud out;
    out.dim = 2 * d;
    out.x.resize(count * out.dim);
    auto nchunks = static_cast<std::ptrdiff_t>((count + kChunk - 1) / kChunk);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t c = 0; c < nchunks; ++c) {
        Stream rng(seed, static_cast<std::uint64_t>(c));
        std::size_t lo = static_cast<std::size_t>(c) * kChunk;
        std::size_t hi = std::min(count, lo + kChunk);
        std::vector<Complex> z(d);
        for (std::size_t i = lo; i < hi; ++i) {
            z = y.z;
            for (auto it = dirs.rbegin(); it != dirs.rend(); ++it)
                kern::move<Complex>(std::span<Complex>(z), *it, rng.uniform());
            double* p = out.at(i);
            for (int k = 0; k < d; ++k) {
                p[2 * k] = z[k].real();
                p[2 * k + 1] = z[k].imag();
            }
        }
    }
    return out;
}

double bonferroni_z(std::size_t nballs)
{
    boost::math::normal_distribution<double> n01;
    return boost::math::quantile(n01, 1.0 - 1e-3 / (2.0 * static_cast<double>(nballs)));
}

DistributionReport test_UD_against(const PointCloud& orbit, const SortedCloud& reference,
                                   const PointCloud& reference_raw, double eps, std::size_t nballs,
                                   std::uint64_t seed, double radius)
{
    if (orbit.size() == 0)
        throw PreconditionError("empty orbit");
    if (!(eps > 0.0) || !(radius > 0.0) || nballs == 0)
        throw PreconditionError("test_UD_along needs eps > 0, radius > 0 and nballs >= 1");
    const int d = orbit.dim / 2;
    DistributionReport rep;
    rep.test = "ud_along";
    rep.eps = eps;
    rep.nballs = nballs;
    rep.seed = seed;

    // half the centers on the reference set, half uniform on the sphere
    PointCloud centers;
    centers.dim = orbit.dim;
    {
        Stream rng(seed, 0x7fffffffull);
        std::size_t from_ref = nballs / 2;
        for (std::size_t b = 0; b < from_ref; ++b) {
            std::size_t i = static_cast<std::size_t>(rng.bits() % reference_raw.size());
            const double* p = reference_raw.at(i);
            centers.x.insert(centers.x.end(), p, p + orbit.dim);
        }
        PointCloud uni = lebesgue_cloud(d, nballs - from_ref, seed);
        centers.x.insert(centers.x.end(), uni.x.begin(), uni.x.end());
    }

    auto sorted = sort_cloud(orbit);
    auto oc = count_in_balls(sorted, centers, radius);
    auto rc = count_in_balls(reference, centers, radius);
    const double no = static_cast<double>(sorted.size());
    const double nr = static_cast<double>(reference.size());
    rep.orbit_count = finite_count(orbit);
    rep.reference_count = reference.size();
    if (sorted.size() == 0) {
        rep.pass = false;
        rep.inconclusive = true;
        return rep;
    }
    const double z = bonferroni_z(nballs);

    rep.pass = true;
    rep.worst_ratio = -1;
    std::size_t resolved = 0, occupied = 0;
    for (std::size_t b = 0; b < nballs; ++b) {
        BallStat s;
        s.center = row(centers, b);
        s.radius = radius;
        s.observed = static_cast<double>(oc[b]) / no;
        s.expected = static_cast<double>(rc[b]) / nr;
        double pooled = static_cast<double>(oc[b] + rc[b]) / (no + nr);
        s.allowance = z * std::sqrt(pooled * (1 - pooled) * (1 / no + 1 / nr));
        double lo = (1 - eps) * s.expected - s.allowance;
        double hi = (1 + eps) * s.expected + s.allowance;
        s.ok = lo <= s.observed && s.observed <= hi;
        if (s.expected > 0) {
            ++occupied;
            resolved += s.allowance <= 0.5 * s.expected;
        }
        double band = eps * s.expected + s.allowance;
        double ratio = band > 0 ? std::abs(s.observed - s.expected) / band : 0.0;
        if (!s.ok)
            rep.pass = false;
        if (ratio > rep.worst_ratio) {
            rep.worst_ratio = ratio;
            rep.worst = s;
        }
        rep.balls.push_back(std::move(s));
    }
    // the counts cannot even tell an occupied ball from an empty one
    rep.inconclusive = occupied == 0 || 2 * resolved < occupied;
    return rep;
}

DistributionReport test_UD_along(const PointCloud& orbit, const SpherePoint& y, std::span<const Axis> dirs,
                                 double eps, std::size_t nballs, std::uint64_t seed,
                                 std::size_t reference_count, double radius)
{
    PointCloud raw = reference_cloud(y, dirs, reference_count, derive_seed(seed, "reference"));
    auto sorted = sort_cloud(raw);
    auto rep = test_UD_against(orbit, sorted, raw, eps, nballs, seed, radius);
    rep.dirs.assign(dirs.begin(), dirs.end());
    return rep;
}

TransversalReport test_transversal(const SpherePoint& z, TransversalIndex m, std::span<const Axis> dirs,
                                   double nu, double C, std::size_t nsamples, std::uint64_t seed)
{
    if (!(nu > 0.0))
        throw PreconditionError("transversality needs nu > 0");
    const int d = z.dim();
    for (const auto& a : dirs)
        a.validate(d);
    if (m.m < 1 || m.m > d || m.pair < 0 || m.pair > d || m.pair == m.m)
        throw PreconditionError("bad transversal index");

    // bad[i][lambda] counts parameter draws where the condition is violated
    std::vector<std::array<std::size_t, 2>> bad(d, {0, 0});
    Stream rng(seed, 0);
    std::vector<Complex> w(d);
    for (std::size_t s = 0; s < nsamples; ++s) {
        w = z.z;
        for (auto it = dirs.rbegin(); it != dirs.rend(); ++it)
            kern::move<Complex>(std::span<Complex>(w), *it, rng.uniform());
        const Complex wm = w[m.m - 1];
        if (m.pair > 0) {
            // the condition compares against the untransformed z_m
            if (std::abs(w[m.pair - 1] - z.z[m.m - 1]) < nu)
                ++bad[m.pair - 1][1];
            continue;
        }
        for (int i = 1; i <= d; ++i) {
            if (i == m.m)
                continue;
            if (std::abs(wm) < nu)
                ++bad[i - 1][0];
            if (std::abs(w[i - 1] - wm) < nu)
                ++bad[i - 1][1];
        }
    }

    TransversalReport rep;
    rep.index = m;
    rep.dirs.assign(dirs.begin(), dirs.end());
    rep.nu = nu;
    rep.C = C;
    rep.nsamples = nsamples;
    rep.seed = seed;
    const double bound = C * nu;
    const double slack = bound < 1 ? 3.0 * std::sqrt(bound * (1 - bound) / static_cast<double>(nsamples)) : 0.0;
    rep.pass = true;
    for (int i = 1; i <= d; ++i) {
        for (int lam = 0; lam < 2; ++lam) {
            double meas = static_cast<double>(bad[i - 1][lam]) / static_cast<double>(nsamples);
            if (rep.worst_i == 0 || meas > rep.worst_measure) {
                rep.worst_measure = meas;
                rep.worst_i = i;
                rep.worst_lambda = lam;
            }
            if (!(meas < bound + slack))
                rep.pass = false;
        }
    }
    return rep;
}

}  // namespace akc
