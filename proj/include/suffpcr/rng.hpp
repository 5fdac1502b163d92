#pragma once

#include "suffpcr/linalg.hpp"

#include <cstdint>
#include <random>
#include <string_view>

namespace suffpcr {

/// Seedable, splittable source of independent streams. Each named stream is a
/// std::mt19937_64 seeded from (master seed, stream name, index), so a stream's
/// output never depends on how much another stream was consumed.
class StreamFactory
{
public:
    explicit StreamFactory(std::uint64_t master_seed) : master_(master_seed) {}

    std::mt19937_64 stream(std::string_view name, std::uint64_t index = 0) const;

    /// A child factory, e.g. one per replication.
    StreamFactory split(std::uint64_t index) const;

    std::uint64_t master_seed() const noexcept { return master_; }

private:
    std::uint64_t master_;
};

std::uint64_t splitmix64(std::uint64_t x);

Matrix standard_normal(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols);
Vector standard_normal(std::mt19937_64& rng, Eigen::Index size);

} // namespace suffpcr
