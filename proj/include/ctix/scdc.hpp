#pragma once

#include <cstdint>
#include <vector>

#include "ctix/io.hpp"

namespace ctix::scdc {

// Symbol absent from the model's vocabulary.
struct VocabularyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Byte-oriented dense coding. Byte values [0, s) are stoppers, [s, 256) are
// continuers; a codeword is zero or more continuers followed by one stopper,
// so codewords are self-delimiting in both scan directions. There are
// s * c^(j-1) codewords of length j, assigned to ranks in increasing length
// order; lower ranks get shorter codewords.
struct Params {
    uint16_t s = 128;
    uint16_t c = 128;
};

inline void validate(const Params& p) {
    if (p.s < 1 || p.s > 255 || p.s + p.c != 256)
        throw std::invalid_argument("dense code needs 1 <= s <= 255 and s + c == 256");
}

// Codeword byte length for a rank under the given split.
uint32_t codeword_length(const Params& p, uint64_t rank);

// Maps symbols to ranks by decreasing frequency (ties: smaller symbol value
// first). Vocabulary is exactly the symbols with nonzero frequency.
class FrequencyModel {
public:
    FrequencyModel() = default;

    // freq_by_symbol[s] = occurrences of symbol s.
    static FrequencyModel from_frequencies(const std::vector<uint64_t>& freq_by_symbol);

    size_t vocabulary() const { return rank_to_symbol_.size(); }
    uint32_t rank_of(uint32_t symbol) const;
    uint32_t symbol_at(uint32_t rank) const;
    bool contains(uint32_t symbol) const {
        return symbol < symbol_to_rank_.size() && symbol_to_rank_[symbol] != kNoRank;
    }

    // Frequencies reordered by rank; available only on models built from
    // frequencies (not serialized).
    const std::vector<uint64_t>& freq_by_rank() const { return freq_by_rank_; }

    uint64_t bytes() const { return rank_to_symbol_.size() * 8 + 1; }

private:
    static constexpr uint32_t kNoRank = UINT32_MAX;
    std::vector<uint32_t> rank_to_symbol_;
    std::vector<uint32_t> symbol_to_rank_;
    std::vector<uint64_t> freq_by_rank_;
};

// Exhaustive sweep over every split s in [1, 255], minimizing the total
// encoded size of a stream with the given rank-ordered frequencies. Ties go
// to the smaller s.
Params choose_optimal_s(const std::vector<uint64_t>& freq_by_rank);

// Total encoded bytes of a stream under a split (the sweep's objective).
uint64_t encoded_bytes(const Params& p, const std::vector<uint64_t>& freq_by_rank);

void encode_symbol(const FrequencyModel& m, const Params& p, uint32_t symbol,
                   std::vector<uint8_t>& out);
std::vector<uint8_t> encode_stream(const FrequencyModel& m, const Params& p,
                                   const std::vector<uint32_t>& symbols);

// Decodes `count` symbols starting at a codeword boundary.
std::vector<uint32_t> decode_stream_from(const uint8_t* bytes, size_t len, size_t offset,
                                         size_t count, const FrequencyModel& m, const Params& p);

// Thread-local count of symbols decoded by any decoder on this thread.
uint64_t decoded_symbols();
void reset_decoded_symbols();

// Forward decoder over one stream extent.
class StreamDecoder {
public:
    StreamDecoder(const uint8_t* begin, const uint8_t* end, const FrequencyModel& m,
                  const Params& p);
    bool has_more() const { return p_ != end_; }
    uint32_t next();
    size_t byte_offset(const uint8_t* base) const { return size_t(p_ - base); }
    void skip_to(const uint8_t* pos);

private:
    const uint8_t* p_;
    const uint8_t* end_;
    const FrequencyModel* model_;
    Params params_;
};

// Backward decoder; yields symbols from last to first. Works because stopper
// and continuer byte ranges are disjoint: scanning left from the stream end,
// each stopper byte closes exactly one codeword.
class ReverseStreamDecoder {
public:
    ReverseStreamDecoder(const uint8_t* begin, const uint8_t* end, const FrequencyModel& m,
                         const Params& p);
    bool has_more() const { return p_ != begin_; }
    uint32_t prev();

private:
    const uint8_t* begin_;
    const uint8_t* p_;
    const FrequencyModel* model_;
    Params params_;
};

// Model plus split serialized together: vocabulary size, rank-to-symbol
// table (64-bit each), then s as a single byte.
void save_model(io::Writer& w, const FrequencyModel& m, const Params& p);
std::pair<FrequencyModel, Params> load_model(io::Reader& r);

}  // namespace ctix::scdc
