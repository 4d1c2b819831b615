#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace ctix {

// Thrown when a serialized block fails validation (bad magic, truncated
// payload, out-of-range field). The CLI maps this to its own exit code.
struct CorruptFile : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace io {

// All on-disk integers are little-endian, written byte by byte so the format
// does not depend on host endianness.

class Writer {
public:
    virtual ~Writer() = default;

    void raw(const void* data, size_t n) {
        sink(data, n);
        written_ += n;
    }
    void u8(uint8_t v) { raw(&v, 1); }
    void u16(uint16_t v) {
        uint8_t b[2] = {uint8_t(v), uint8_t(v >> 8)};
        raw(b, 2);
    }
    void u32(uint32_t v) {
        uint8_t b[4] = {uint8_t(v), uint8_t(v >> 8), uint8_t(v >> 16), uint8_t(v >> 24)};
        raw(b, 4);
    }
    void u64(uint64_t v) {
        uint8_t b[8];
        for (int i = 0; i < 8; ++i) b[i] = uint8_t(v >> (8 * i));
        raw(b, 8);
    }
    void i32(int32_t v) { u32(static_cast<uint32_t>(v)); }
    void f64(double v) {
        uint64_t bits;
        std::memcpy(&bits, &v, 8);
        u64(bits);
    }
    void str(const std::string& s) {
        u32(static_cast<uint32_t>(s.size()));
        raw(s.data(), s.size());
    }

    uint64_t bytes_written() const { return written_; }

protected:
    virtual void sink(const void* data, size_t n) = 0;

private:
    uint64_t written_ = 0;
};

class VectorWriter final : public Writer {
public:
    const std::vector<uint8_t>& buffer() const { return buf_; }
    std::vector<uint8_t> take() { return std::move(buf_); }

protected:
    void sink(const void* data, size_t n) override {
        const uint8_t* p = static_cast<const uint8_t*>(data);
        buf_.insert(buf_.end(), p, p + n);
    }

private:
    std::vector<uint8_t> buf_;
};

// Measures serialized size without materializing bytes.
class CountingWriter final : public Writer {
protected:
    void sink(const void*, size_t) override {}
};

class FileWriter final : public Writer {
public:
    explicit FileWriter(const std::string& path) : out_(path, std::ios::binary) {
        if (!out_) throw std::runtime_error("cannot open for writing: " + path);
    }
    void close() {
        out_.close();
        if (!out_) throw std::runtime_error("write failure on close");
    }

protected:
    void sink(const void* data, size_t n) override {
        out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
        if (!out_) throw std::runtime_error("write failure");
    }

private:
    std::ofstream out_;
};

// Bounds-checked reader over an in-memory image of a serialized block.
class Reader {
public:
    Reader(const uint8_t* data, size_t n) : p_(data), end_(data + n) {}
    explicit Reader(const std::vector<uint8_t>& buf) : Reader(buf.data(), buf.size()) {}

    size_t remaining() const { return static_cast<size_t>(end_ - p_); }

    void raw(void* out, size_t n) {
        if (remaining() < n) throw CorruptFile("truncated block");
        std::memcpy(out, p_, n);
        p_ += n;
    }
    uint8_t u8() {
        uint8_t v;
        raw(&v, 1);
        return v;
    }
    uint16_t u16() {
        uint8_t b[2];
        raw(b, 2);
        return uint16_t(b[0] | (uint16_t(b[1]) << 8));
    }
    uint32_t u32() {
        uint8_t b[4];
        raw(b, 4);
        return uint32_t(b[0]) | (uint32_t(b[1]) << 8) | (uint32_t(b[2]) << 16) | (uint32_t(b[3]) << 24);
    }
    uint64_t u64() {
        uint8_t b[8];
        raw(b, 8);
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= uint64_t(b[i]) << (8 * i);
        return v;
    }
    int32_t i32() { return static_cast<int32_t>(u32()); }
    double f64() {
        uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    }
    std::string str() {
        uint32_t n = u32();
        if (remaining() < n) throw CorruptFile("truncated string");
        std::string s(reinterpret_cast<const char*>(p_), n);
        p_ += n;
        return s;
    }

private:
    const uint8_t* p_;
    const uint8_t* end_;
};

inline std::vector<uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::streamsize n = in.tellg();
    in.seekg(0);
    std::vector<uint8_t> buf(static_cast<size_t>(n));
    if (n > 0) in.read(reinterpret_cast<char*>(buf.data()), n);
    if (!in) throw std::runtime_error("read failure: " + path);
    return buf;
}

}  // namespace io
}  // namespace ctix
