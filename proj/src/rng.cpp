#include "suffpcr/rng.hpp"

namespace suffpcr {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

namespace {

std::uint64_t fnv1a(std::string_view text)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace

std::mt19937_64 StreamFactory::stream(std::string_view name, std::uint64_t index) const
{
    const std::uint64_t a = splitmix64(master_);
    const std::uint64_t b = splitmix64(a ^ fnv1a(name));
    const std::uint64_t c = splitmix64(b + index);
    std::seed_seq seq{static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    return std::mt19937_64(seq);
}

StreamFactory StreamFactory::split(std::uint64_t index) const
{
    return StreamFactory(splitmix64(splitmix64(master_) ^ splitmix64(index + 0x632be59bd9b4e019ULL)));
}

Matrix standard_normal(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols)
{
    std::normal_distribution<double> normal;
    Matrix m(rows, cols);
    // Column-major fill order is part of the reproducibility contract.
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i)
            m(i, j) = normal(rng);
    return m;
}

Vector standard_normal(std::mt19937_64& rng, Eigen::Index size)
{
    std::normal_distribution<double> normal;
    Vector v(size);
    for (Eigen::Index i = 0; i < size; ++i)
        v[i] = normal(rng);
    return v;
}

} // namespace suffpcr
