#include "nli/spectral_cache.hpp"

#include <array>
#include <cstring>
#include <fstream>
#include <iostream>
#include <mutex>
#include <system_error>
#include <vector>

namespace nli {

namespace {

constexpr std::array<char, 8> kMagic{'N', 'L', 'I', 'S', 'P', 'E', 'C', '\0'};

std::uint64_t fnv1a(const std::vector<char>& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    return h;
}

template <typename T>
void put(std::vector<char>& buf, const T& v) {
    const auto* p = reinterpret_cast<const char*>(&v);
    buf.insert(buf.end(), p, p + sizeof(T));
}

template <typename T>
bool get(const std::vector<char>& buf, std::size_t& pos, T& v) {
    if (pos + sizeof(T) > buf.size()) return false;
    std::memcpy(&v, buf.data() + pos, sizeof(T));
    pos += sizeof(T);
    return true;
}

} // namespace

void stderr_warning(const std::string& msg) { std::cerr << "warning: " << msg << '\n'; }

SpectralStore::SpectralStore(std::filesystem::path dir, WarningSink warn)
    : dir_(std::move(dir)), warn_(warn ? std::move(warn) : WarningSink(stderr_warning)) {}

std::filesystem::path SpectralStore::path_for(int n_total) const {
    return dir_ / ("spectral_v" + std::to_string(kFormatVersion) + "_N" + std::to_string(n_total) + ".bin");
}

std::optional<Spectral> SpectralStore::load(int n_total) const {
    const auto path = path_for(n_total);
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::vector<char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    auto corrupt = [&](const char* why) -> std::optional<Spectral> {
        warn_("corrupt spectral cache entry " + path.string() + " (" + why + "); recomputing");
        return std::nullopt;
    };

    const FockSector sector(n_total);
    const auto dim = static_cast<std::size_t>(sector.dim());
    const std::size_t payload = kMagic.size() + 2 * sizeof(std::uint32_t) + (dim + dim * dim) * sizeof(double);
    if (buf.size() != payload + sizeof(std::uint64_t)) return corrupt("size mismatch");

    std::uint64_t stored_hash = 0;
    std::memcpy(&stored_hash, buf.data() + payload, sizeof stored_hash);
    buf.resize(payload);
    if (fnv1a(buf) != stored_hash) return corrupt("checksum mismatch");
    if (std::memcmp(buf.data(), kMagic.data(), kMagic.size()) != 0) return corrupt("bad magic");

    std::size_t pos = kMagic.size();
    std::uint32_t version = 0, n = 0;
    get(buf, pos, version);
    get(buf, pos, n);
    if (version != kFormatVersion) return corrupt("format version mismatch");
    if (n != static_cast<std::uint32_t>(n_total)) return corrupt("sector mismatch");

    Spectral s{sector, VectorX<double>(dim), MatrixX<double>(dim, dim)};
    std::memcpy(s.eigenvalues.data(), buf.data() + pos, dim * sizeof(double));
    pos += dim * sizeof(double);
    std::memcpy(s.eigenvectors.data(), buf.data() + pos, dim * dim * sizeof(double));
    return s;
}

bool SpectralStore::save(const Spectral& spectral) const {
    std::vector<char> buf(kMagic.begin(), kMagic.end());
    put(buf, kFormatVersion);
    put(buf, static_cast<std::uint32_t>(spectral.sector.n_total));
    const auto dim = static_cast<std::size_t>(spectral.sector.dim());
    const auto* ev = reinterpret_cast<const char*>(spectral.eigenvalues.data());
    buf.insert(buf.end(), ev, ev + dim * sizeof(double));
    const auto* vec = reinterpret_cast<const char*>(spectral.eigenvectors.data());
    buf.insert(buf.end(), vec, vec + dim * dim * sizeof(double));
    put(buf, fnv1a(buf));

    const auto path = path_for(spectral.sector.n_total);
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out || !out.write(buf.data(), static_cast<std::streamsize>(buf.size()))) {
            warn_("cannot write spectral cache entry " + tmp.string());
            return false;
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        warn_("cannot finalize spectral cache entry " + path.string() + ": " + ec.message());
        std::filesystem::remove(tmp, ec);
        return false;
    }
    return true;
}

SpectralCache::SpectralCache(const std::filesystem::path& dir, WarningSink warn) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) {
        (warn ? warn : WarningSink(stderr_warning))("spectral cache directory " + dir.string() +
                                                    " is not usable; continuing in memory only");
        return;
    }
    store_.emplace(dir, std::move(warn));
}

std::shared_ptr<const Spectral> SpectralCache::get(int n_total) {
    {
        std::shared_lock lock(mutex_);
        if (auto it = entries_.find(n_total); it != entries_.end()) {
            ++memory_hits_;
            return it->second;
        }
    }

    std::shared_ptr<const Spectral> value;
    if (store_) {
        if (auto loaded = store_->load(n_total)) {
            value = std::make_shared<const Spectral>(std::move(*loaded));
            ++disk_hits_;
        }
    }
    if (!value) {
        value = std::make_shared<const Spectral>(diagonalize(build_coupling<double>(FockSector(n_total))));
        ++computed_;
        if (store_) store_->save(*value);
    }

    std::unique_lock lock(mutex_);
    auto [it, inserted] = entries_.emplace(n_total, value);
    return it->second;
}

SpectralCache::Stats SpectralCache::stats() const {
    return {memory_hits_.load(), disk_hits_.load(), computed_.load()};
}

std::size_t SpectralCache::size() const {
    std::shared_lock lock(mutex_);
    return entries_.size();
}

SpectralCache& default_cache() {
    static SpectralCache cache;
    return cache;
}

} // namespace nli
