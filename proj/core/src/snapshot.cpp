#include "gravitree/snapshot.hpp"

#include <bit>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <vector>

#include "gravitree/errors.hpp"

namespace gravitree {

namespace {

void put_u32(std::string& out, std::uint32_t v) {
    for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
    for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
}

void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

class Reader {
public:
    Reader(const std::string& path, std::string data) : path_(path), data_(std::move(data)) {}

    std::size_t offset() const { return offset_; }

    void need(std::size_t bytes, const char* what) {
        if (offset_ + bytes > data_.size())
            throw data_error(path_ + ": truncated " + what + " at byte " + std::to_string(offset_));
    }
    std::uint32_t u32(const char* what) {
        need(4, what);
        std::uint32_t v = 0;
        for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data_[offset_ + b])) << (8 * b);
        offset_ += 4;
        return v;
    }
    std::uint64_t u64(const char* what) {
        need(8, what);
        std::uint64_t v = 0;
        for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[offset_ + b])) << (8 * b);
        offset_ += 8;
        return v;
    }
    double f64(const char* what) { return std::bit_cast<double>(u64(what)); }
    char byte(const char* what) {
        need(1, what);
        return data_[offset_++];
    }

private:
    const std::string& path_;
    std::string data_;
    std::size_t offset_ = 0;
};

}  // namespace

void write_text_atomic(const std::string& path, const std::string& content);  // csv.cpp

void write_snapshot(const std::string& path, const ParticleSystem& system, const GravParams& params) {
    if (system.n() == 0) throw data_error("write_snapshot: empty system");
    std::string out;
    out.reserve(32 + system.n() * 7 * 8);
    out.append(kSnapshotMagic, 4);
    put_u32(out, kSnapshotVersion);
    put_u64(out, system.n());
    put_f64(out, system.time);
    put_f64(out, params.G);
    put_f64(out, params.eps);
    for (double m : system.mass) put_f64(out, m);
    for (const Vec3& p : system.pos) {
        put_f64(out, p.x);
        put_f64(out, p.y);
        put_f64(out, p.z);
    }
    for (const Vec3& v : system.vel) {
        put_f64(out, v.x);
        put_f64(out, v.y);
        put_f64(out, v.z);
    }
    write_text_atomic(path, out);
}

Snapshot read_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error(path + ": cannot open");
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    Reader r(path, std::move(data));

    for (int i = 0; i < 4; ++i)
        if (r.byte("magic") != kSnapshotMagic[i])
            throw data_error(path + ": bad magic at byte " + std::to_string(i));
    const std::uint32_t version = r.u32("version");
    if (version != kSnapshotVersion)
        throw data_error(path + ": unsupported version " + std::to_string(version) + " at byte 4");
    const std::uint64_t n = r.u64("particle count");
    if (n == 0) throw data_error(path + ": zero particle count at byte 8");

    Snapshot snap;
    snap.system.resize(n);
    snap.system.time = r.f64("time");
    snap.G = r.f64("G");
    snap.eps = r.f64("eps");
    for (std::uint64_t i = 0; i < n; ++i) snap.system.mass[i] = r.f64("mass array");
    for (std::uint64_t i = 0; i < n; ++i) {
        snap.system.pos[i].x = r.f64("position array");
        snap.system.pos[i].y = r.f64("position array");
        snap.system.pos[i].z = r.f64("position array");
    }
    for (std::uint64_t i = 0; i < n; ++i) {
        snap.system.vel[i].x = r.f64("velocity array");
        snap.system.vel[i].y = r.f64("velocity array");
        snap.system.vel[i].z = r.f64("velocity array");
    }
    return snap;
}

}  // namespace gravitree
