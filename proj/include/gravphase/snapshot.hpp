#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <variant>

#include "gravphase/core.hpp"
#include "gravphase/fock.hpp"
#include "gravphase/gaussian.hpp"
#include "gravphase/phase_space.hpp"

// Binary snapshot (.wwps): a fixed 152-byte little-endian header followed by
// dim0 * dim1 doubles (interleaved re/im pairs when complex), row-major.
//
//   offset  size  field
//        0     4  magic "WWPS"
//        4     4  u32 version (1)
//        8     4  u32 kind: 0 wavefunction, 1 wigner, 2 weyl, 3 covariance
//       12     4  u32 flags: bit 0 set for complex payloads
//       16     8  u64 dim0
//       24     8  u64 dim1
//       32    96  12 x f64 kind-specific descriptors
//      128     8  f64 time
//      136     8  u64 config digest
//      144     8  u64 aux (field origin or covariance frame)

namespace gravphase {

enum class SnapshotKind : std::uint32_t { wavefunction = 0, wigner = 1, weyl = 2, covariance = 3 };

inline constexpr std::uint32_t snapshot_version = 1;
inline constexpr std::size_t snapshot_header_size = 152;

struct SnapshotHeader {
    SnapshotKind kind = SnapshotKind::wavefunction;
    std::uint32_t version = snapshot_version;
    std::uint32_t flags = 0;
    std::uint64_t dim0 = 0;
    std::uint64_t dim1 = 0;
    std::array<double, 12> desc{};
    double time = 0;
    std::uint64_t digest = 0;
    std::uint64_t aux = 0;
};

using SnapshotData = std::variant<WavefunctionState, WignerField, WeylMatrix, CovarianceMatrix>;

struct Snapshot {
    SnapshotHeader header;
    SnapshotData data;
};

void write_snapshot(const std::filesystem::path& path, const SnapshotData& data, std::uint64_t digest);

// Throws SnapshotError on a bad magic, unknown version or kind, or a short file.
// A digest different from `expected_digest` is reported on `warn` only.
Snapshot read_snapshot(const std::filesystem::path& path, std::optional<std::uint64_t> expected_digest = std::nullopt,
                       std::ostream* warn = nullptr);

} // namespace gravphase
