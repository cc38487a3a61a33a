#include "gravphase/snapshot.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <ostream>
#include <type_traits>
#include <vector>

#include "gravphase/errors.hpp"

namespace gravphase {

static_assert(std::endian::native == std::endian::little, "snapshot I/O assumes a little-endian host");

namespace {

class Writer {
public:
    template <class T>
    void put(const T& v) {
        static_assert(std::is_trivially_copyable_v<T>);
        const auto* b = reinterpret_cast<const char*>(&v);
        bytes_.insert(bytes_.end(), b, b + sizeof(T));
    }
    const std::vector<char>& bytes() const { return bytes_; }

private:
    std::vector<char> bytes_;
};

class Reader {
public:
    explicit Reader(std::vector<char> bytes) : bytes_(std::move(bytes)) {}
    template <class T>
    T get() {
        if (pos_ + sizeof(T) > bytes_.size()) throw SnapshotError("snapshot truncated");
        T v;
        std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return v;
    }
    std::size_t remaining() const { return bytes_.size() - pos_; }

private:
    std::vector<char> bytes_;
    std::size_t pos_ = 0;
};

SnapshotHeader header_for(const SnapshotData& data) {
    SnapshotHeader h;
    std::visit(
        [&](const auto& d) {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, WavefunctionState>) {
                h.kind = SnapshotKind::wavefunction;
                h.flags = 1;
                h.dim0 = d.psi.size();
                h.dim1 = 1;
                h.desc[0] = d.grid.min;
                h.desc[1] = d.grid.max;
                h.time = d.t;
            } else if constexpr (std::is_same_v<T, WignerField>) {
                h.kind = SnapshotKind::wigner;
                h.dim0 = d.grid.r.n;
                h.dim1 = d.grid.p.n;
                h.desc[0] = d.grid.r.min;
                h.desc[1] = d.grid.r.max;
                h.desc[2] = d.grid.p.min;
                h.desc[3] = d.grid.p.max;
                h.time = d.t;
                h.aux = static_cast<std::uint64_t>(d.origin);
            } else if constexpr (std::is_same_v<T, WeylMatrix>) {
                h.kind = SnapshotKind::weyl;
                h.flags = 1;
                h.dim0 = static_cast<std::uint64_t>(d.rho.rows());
                h.dim1 = static_cast<std::uint64_t>(d.rho.cols());
                const auto& b = d.basis;
                h.desc = {b.ell, b.hbar, b.mu, b.center_r, b.center_p, b.frame[0], b.frame[1], b.frame[2], b.frame[3],
                          d.leakage, 0, 0};
                h.time = d.t;
                h.aux = static_cast<std::uint64_t>(d.origin);
            } else {
                h.kind = SnapshotKind::covariance;
                h.dim0 = 4;
                h.dim1 = 4;
                h.time = d.t;
                h.aux = static_cast<std::uint64_t>(d.frame);
            }
        },
        data);
    return h;
}

} // namespace

void write_snapshot(const std::filesystem::path& path, const SnapshotData& data, std::uint64_t digest) {
    SnapshotHeader h = header_for(data);
    h.digest = digest;
    Writer w;
    w.put(std::array<char, 4>{'W', 'W', 'P', 'S'});
    w.put(h.version);
    w.put(static_cast<std::uint32_t>(h.kind));
    w.put(h.flags);
    w.put(h.dim0);
    w.put(h.dim1);
    for (double v : h.desc) w.put(v);
    w.put(h.time);
    w.put(h.digest);
    w.put(h.aux);

    std::visit(
        [&](const auto& d) {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, WavefunctionState>) {
                for (const cplx& z : d.psi) {
                    w.put(z.real());
                    w.put(z.imag());
                }
            } else if constexpr (std::is_same_v<T, WignerField>) {
                for (double v : d.values) w.put(v);
            } else if constexpr (std::is_same_v<T, WeylMatrix>) {
                for (Eigen::Index i = 0; i < d.rho.rows(); ++i)
                    for (Eigen::Index j = 0; j < d.rho.cols(); ++j) {
                        w.put(d.rho(i, j).real());
                        w.put(d.rho(i, j).imag());
                    }
            } else {
                for (int i = 0; i < 4; ++i)
                    for (int j = 0; j < 4; ++j) w.put(d.sigma(i, j));
            }
        },
        data);

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw SnapshotError("cannot open " + path.string() + " for writing");
    out.write(w.bytes().data(), static_cast<std::streamsize>(w.bytes().size()));
    if (!out) throw SnapshotError("write failed for " + path.string());
}

Snapshot read_snapshot(const std::filesystem::path& path, std::optional<std::uint64_t> expected_digest,
                       std::ostream* warn) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SnapshotError("cannot open " + path.string());
    Reader r(std::vector<char>(std::istreambuf_iterator<char>(in), {}));

    const auto magic = r.get<std::array<char, 4>>();
    if (std::memcmp(magic.data(), "WWPS", 4) != 0) throw SnapshotError(path.string() + " is not a snapshot file");
    SnapshotHeader h;
    h.version = r.get<std::uint32_t>();
    if (h.version != snapshot_version)
        throw SnapshotError("unsupported snapshot version " + std::to_string(h.version));
    const auto kind = r.get<std::uint32_t>();
    if (kind > 3) throw SnapshotError("unknown snapshot kind " + std::to_string(kind));
    h.kind = static_cast<SnapshotKind>(kind);
    h.flags = r.get<std::uint32_t>();
    h.dim0 = r.get<std::uint64_t>();
    h.dim1 = r.get<std::uint64_t>();
    for (double& v : h.desc) v = r.get<double>();
    h.time = r.get<double>();
    h.digest = r.get<std::uint64_t>();
    h.aux = r.get<std::uint64_t>();

    const std::uint64_t per = (h.flags & 1u) ? 2 : 1;
    if (h.dim1 != 0 && h.dim0 > r.remaining() / 8 / h.dim1 / per + 1) throw SnapshotError("snapshot truncated");
    if (h.dim0 * h.dim1 * per * 8 != r.remaining())
        throw SnapshotError(r.remaining() < h.dim0 * h.dim1 * per * 8 ? "snapshot truncated"
                                                                      : "snapshot has trailing bytes");

    if (expected_digest && *expected_digest != h.digest && warn)
        *warn << "warning: snapshot " << path.string() << " was written with a different configuration digest\n";

    Snapshot s{h, WavefunctionState{}};
    switch (h.kind) {
    case SnapshotKind::wavefunction: {
        WavefunctionState st;
        st.grid = {h.desc[0], h.desc[1], h.dim0};
        st.t = h.time;
        st.psi.resize(h.dim0);
        for (auto& z : st.psi) {
            const double re = r.get<double>();
            z = {re, r.get<double>()};
        }
        s.data = std::move(st);
        break;
    }
    case SnapshotKind::wigner: {
        WignerField f;
        f.grid.r = {h.desc[0], h.desc[1], h.dim0};
        f.grid.p = {h.desc[2], h.desc[3], h.dim1};
        f.t = h.time;
        f.origin = static_cast<FieldOrigin>(h.aux);
        f.values.resize(h.dim0 * h.dim1);
        for (double& v : f.values) v = r.get<double>();
        s.data = std::move(f);
        break;
    }
    case SnapshotKind::weyl: {
        WeylMatrix w;
        w.basis.dim = h.dim0;
        w.basis.ell = h.desc[0];
        w.basis.hbar = h.desc[1];
        w.basis.mu = h.desc[2];
        w.basis.center_r = h.desc[3];
        w.basis.center_p = h.desc[4];
        w.basis.frame = {h.desc[5], h.desc[6], h.desc[7], h.desc[8]};
        w.leakage = h.desc[9];
        w.t = h.time;
        w.origin = static_cast<FieldOrigin>(h.aux);
        w.rho.resize(static_cast<Eigen::Index>(h.dim0), static_cast<Eigen::Index>(h.dim1));
        for (Eigen::Index i = 0; i < w.rho.rows(); ++i)
            for (Eigen::Index j = 0; j < w.rho.cols(); ++j) {
                const double re = r.get<double>();
                w.rho(i, j) = {re, r.get<double>()};
            }
        s.data = std::move(w);
        break;
    }
    case SnapshotKind::covariance: {
        if (h.dim0 != 4 || h.dim1 != 4) throw SnapshotError("covariance snapshot must be 4x4");
        CovarianceMatrix c;
        c.t = h.time;
        c.frame = static_cast<Frame>(h.aux);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) c.sigma(i, j) = r.get<double>();
        s.data = c;
        break;
    }
    }
    return s;
}

} // namespace gravphase
