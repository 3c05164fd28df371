#include <doctest.h>

#include <string>
#include <vector>

#include "featcode/errors.hpp"
#include "featcode/qr.hpp"
#include "featcode/rng.hpp"
#include "golden_fixture.hpp"

using namespace featcode;

namespace {

std::string matrix_row(const ModuleMatrix& m, int row) {
    std::string s;
    for (int col = 0; col < m.size; ++col) s += m.get(row, col) ? '1' : '0';
    return s;
}

void check_against_golden(const std::string& fixture, int pinned_version = 0) {
    const GoldenSymbol golden = load_golden(fixture_path(fixture));
    QrProfile profile;
    profile.version = pinned_version;
    const ModuleMatrix m = qr_encode(golden.payload, profile);
    CHECK(m.version == golden.version);
    CHECK(m.mask == golden.mask);
    REQUIRE(m.size == golden.size);
    for (int row = 0; row < m.size; ++row) {
        CHECK_MESSAGE(matrix_row(m, row) == golden.rows[static_cast<std::size_t>(row)],
                      fixture, " row ", row);
    }
    CHECK(qr_self_decode(m) == golden.payload);
}

}  // namespace

TEST_CASE("matches reference encoder bit-exactly") {
    check_against_golden("qr/hello_world.txt");
    check_against_golden("qr/cic_payload_69.txt");
    check_against_golden("qr/empty.txt");
    check_against_golden("qr/binary_200.txt");
    check_against_golden("qr/digits_349_v15.txt", 15);
}

TEST_CASE("69-byte payload selects version 4 at level L") {
    std::vector<std::uint8_t> payload(69, '7');
    const ModuleMatrix m = qr_encode(payload);
    CHECK(m.version == 4);
    CHECK(m.size == 33);
}

TEST_CASE("capacity table anchors") {
    CHECK(qr_byte_capacity(1, QrEcc::low) == 17);
    CHECK(qr_byte_capacity(4, QrEcc::low) == 78);
    CHECK(qr_byte_capacity(15, QrEcc::low) == 520);
    CHECK(qr_min_version(69, QrEcc::low) == 4);
}

TEST_CASE("pinned version below requirement reports the version needed") {
    std::vector<std::uint8_t> payload(100, 'x');
    QrProfile profile;
    profile.version = 2;
    try {
        qr_encode(payload, profile);
        FAIL("expected CapacityError");
    } catch (const CapacityError& e) {
        CHECK(std::string(e.what()).find("version 5") != std::string::npos);
    }
}

TEST_CASE("structural invariants on an encoded symbol") {
    const ModuleMatrix m = qr_encode({'a', 'b', 'c'});
    CHECK(m.version == 1);
    CHECK(m.mask >= 0);
    CHECK(m.mask <= 7);

    // three finder patterns: dark center, light ring at distance 2, dark at 3
    auto finder_ok = [&](int row, int col) {
        return m.get(row, col) && !m.get(row - 2, col) && m.get(row - 3, col) &&
               !m.get(row, col - 2) && m.get(row, col - 3);
    };
    CHECK(finder_ok(3, 3));
    CHECK(finder_ok(3, m.size - 4));
    CHECK(finder_ok(m.size - 4, 3));

    // timing patterns alternate along row/column 6
    for (int i = 8; i < m.size - 8; ++i) {
        CHECK(m.get(6, i) == (i % 2 == 0));
        CHECK(m.get(i, 6) == (i % 2 == 0));
    }
}

TEST_CASE("round-trip identity over fuzzed payloads and sizes") {
    Rng rng(1234);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t len = rng.next_below(200);
        std::vector<std::uint8_t> payload(len);
        for (auto& b : payload) b = static_cast<std::uint8_t>(rng.next_below(256));
        const ModuleMatrix m = qr_encode(payload);
        CHECK(qr_self_decode(m) == payload);
    }
}

TEST_CASE("every flipped data module is detected") {
    const ModuleMatrix original = qr_encode({'f', 'l', 'i', 'p'});
    const std::vector<std::uint8_t> function = qr_function_map(original.version);

    // collect codeword module positions in placement order
    const int size = original.size;
    std::vector<std::pair<int, int>> data_positions;
    const int raw_bits = 26 * 8;  // version 1: 26 codewords, no remainder bits
    for (int right = size - 1; right >= 1; right -= 2) {
        if (right == 6) right = 5;
        for (int vert = 0; vert < size; ++vert) {
            for (int j = 0; j < 2; ++j) {
                const int x = right - j;
                const bool upward = ((right + 1) & 2) == 0;
                const int y = upward ? size - 1 - vert : vert;
                if (!function[static_cast<std::size_t>(y) * size + x] &&
                    static_cast<int>(data_positions.size()) < raw_bits) {
                    data_positions.emplace_back(y, x);
                }
            }
        }
    }
    REQUIRE(static_cast<int>(data_positions.size()) == raw_bits);

    for (const auto& [row, col] : data_positions) {
        ModuleMatrix corrupted = original;
        corrupted.set(row, col, !corrupted.get(row, col));
        CHECK_THROWS_AS(qr_self_decode(corrupted), CorruptionError);
    }
}

TEST_CASE("corrupted format information is a structure error") {
    ModuleMatrix m = qr_encode({'q'});
    // flip a bit in both format info copies so neither passes its BCH check
    m.set(8, 0, !m.get(8, 0));
    m.set(m.size - 1, 8, !m.get(m.size - 1, 8));
    CHECK_THROWS_AS(qr_self_decode(m), StructureError);
}
