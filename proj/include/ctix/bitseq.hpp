#pragma once

#include <cstdint>
#include <vector>

#include "ctix/io.hpp"

namespace ctix {

class BitSequence;

// Append-only bit accumulator used while structures are laid out; frozen into
// a BitSequence once complete.
class BitBuilder {
public:
    void push(bool bit) {
        size_t w = n_ / 64;
        if (w == words_.size()) words_.push_back(0);
        if (bit) words_[w] |= uint64_t(1) << (n_ % 64);
        ++n_;
    }
    size_t size() const { return n_; }
    BitSequence build() &&;

private:
    friend class BitSequence;
    std::vector<uint64_t> words_;
    size_t n_ = 0;
};

// Immutable bitmap with a sampled directory for constant-time rank.
//
// Conventions (used by every structure above this one):
//   rank(b, p)   = occurrences of b in positions 0..p inclusive, 0 <= p < size
//   select(b, n) = position of the n-th occurrence, n >= 1; select(b, 0) = -1
//
// rank costs one directory probe plus at most one 512-bit block scan; select
// is a binary search over the directory followed by the same block scan.
class BitSequence {
public:
    BitSequence() = default;
    BitSequence(std::vector<uint64_t> words, size_t nbits);

    size_t size() const { return nbits_; }
    bool empty() const { return nbits_ == 0; }

    bool access(size_t p) const;
    bool operator[](size_t p) const { return access(p); }

    uint64_t count(bool b) const { return b ? ones_ : nbits_ - ones_; }

    uint64_t rank(bool b, size_t p) const;
    uint64_t rank1(size_t p) const { return rank(true, p); }
    uint64_t rank0(size_t p) const { return rank(false, p); }

    int64_t select(bool b, uint64_t n) const;
    int64_t select1(uint64_t n) const { return select(true, n); }
    int64_t select0(uint64_t n) const { return select(false, n); }

    // Occurrences of 1 in positions [0, p); p may equal size. Unchecked
    // building block for the public inclusive rank.
    uint64_t prefix_ones(size_t p) const;

    void save(io::Writer& w) const;
    static BitSequence load(io::Reader& r);

    // Heap bytes of payload plus directory (size accounting).
    uint64_t bytes() const;

private:
    static constexpr size_t kBlockWords = 8;  // 512-bit directory blocks

    void build_directory();

    std::vector<uint64_t> words_;
    std::vector<uint64_t> super_;  // ones before block i
    size_t nbits_ = 0;
    uint64_t ones_ = 0;
};

}  // namespace ctix
