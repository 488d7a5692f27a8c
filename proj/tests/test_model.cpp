/*
   Copyright 2026 The insarstack Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include <filesystem>
#include <functional>
#include <random>

#include <gtest/gtest.h>

#include "insarstack/io.hpp"

using namespace insarstack;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    auto dir = fs::temp_directory_path() / "insarstack-test-model";
    fs::create_directories(dir);
    return dir / name;
}

Stack random_stack(std::mt19937& rng, std::size_t t, std::size_t h, std::size_t w, std::size_t nans)
{
    std::uniform_real_distribution<float> u(-100.0f, 100.0f);
    Stack s(TimeGrid{Date{17000}, 6, static_cast<std::int32_t>(t)}, GeoTransform{1000.5, 2000.25, 20.0}, h, w);
    for (auto& v : s.data.values())
        v = u(rng);
    std::uniform_int_distribution<std::size_t> idx(0, s.data.size() - 1);
    for (std::size_t k = 0; k < nans;) {
        auto i = idx(rng);
        if (std::isnan(s.data[i]))
            continue;
        s.data[i] = kMissing;
        ++k;
    }
    return s;
}

void expect_throw_containing(const std::function<void()>& fn, const std::string& needle)
{
    try {
        fn();
        FAIL() << "expected an exception containing '" << needle << "'";
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
    }
}

}  // namespace

TEST(Date, IsoRoundTrip)
{
    EXPECT_EQ(Date::parse("1970-01-01").days, 0);
    EXPECT_EQ(Date::parse("2016-04-25").iso(), "2016-04-25");
    EXPECT_EQ(Date::parse("2020-03-01").days - Date::parse("2020-02-28").days, 2);
    EXPECT_THROW(Date::parse("2020-02-30"), DataError);
    EXPECT_THROW(Date::parse("2020/02/01"), DataError);
}

TEST(TimeGrid, SlotDatesAreBijective)
{
    TimeGrid g{Date::parse("2016-01-01"), 6, 10};
    for (std::int32_t t = 0; t < g.num_steps; ++t)
        EXPECT_EQ((g.date_of(t).days - g.epoch.days) / g.step_days, t);
    EXPECT_THROW((TimeGrid{Date{}, 0, 3}.validate()), DataError);
}

TEST(Dstk, SingleZeroVoxelLayout)
{
    Stack s(TimeGrid{Date{0}, 6, 1}, GeoTransform{0.0, 0.0, 1.0}, 1, 1, 0.0f);
    auto bytes = encode_stack(s);
    ASSERT_EQ(bytes.size(), 56u);
    EXPECT_EQ(bytes.substr(0, 4), "DSTK");
    EXPECT_EQ(bytes[4], 1);
    EXPECT_EQ(bytes[5], 0);
    EXPECT_EQ(bytes.substr(52), std::string(4, '\0'));
}

TEST(Dstk, HeaderFieldsAreLittleEndian)
{
    Stack s(TimeGrid{Date{-3}, 12, 2}, GeoTransform{1.5, -2.0, 20.0}, 3, 4, 0.0f);
    auto bytes = encode_stack(s);
    auto p = reinterpret_cast<const unsigned char*>(bytes.data());
    EXPECT_EQ(p[8], 2);
    EXPECT_EQ(p[12], 3);
    EXPECT_EQ(p[16], 4);
    double x;
    std::memcpy(&x, p + 20, 8);
    EXPECT_EQ(x, 1.5);
    std::int32_t epoch;
    std::memcpy(&epoch, p + 44, 4);
    EXPECT_EQ(epoch, -3);
    EXPECT_EQ(p[48], 12);
}

TEST(Dstk, RoundTripWithNaNs)
{
    std::mt19937 rng(7);
    auto s = random_stack(rng, 4, 3, 2, 3);
    auto path = scratch("rt.dstk");
    write_stack(s, path);
    auto back = read_stack(path);
    EXPECT_EQ(back, s);
    EXPECT_EQ(back.known_count(), s.data.size() - 3);
}

TEST(Dstk, NaNIsCanonicalizedOnWrite)
{
    Stack s(TimeGrid{Date{0}, 6, 1}, GeoTransform{}, 1, 1);
    s.data[0] = std::bit_cast<float>(0xFFC12345u);
    auto bytes = encode_stack(s);
    auto p = reinterpret_cast<const unsigned char*>(bytes.data()) + kDstkHeaderSize;
    EXPECT_EQ(p[0], 0x00);
    EXPECT_EQ(p[1], 0x00);
    EXPECT_EQ(p[2], 0xC0);
    EXPECT_EQ(p[3], 0x7F);
}

TEST(Dstk, Errors)
{
    Stack empty(TimeGrid{Date{0}, 6, 0}, GeoTransform{}, 1, 1);
    expect_throw_containing([&] { encode_stack(empty); }, "empty stack");

    Stack s(TimeGrid{Date{0}, 6, 2}, GeoTransform{}, 2, 2, 1.0f);
    auto bytes = encode_stack(s);

    auto bad = bytes;
    bad.replace(0, 4, "XXXX");
    expect_throw_containing([&] { decode_stack(bad); }, "bad magic");

    expect_throw_containing([&] { decode_stack(bytes.substr(0, bytes.size() - 1)); }, "truncated");

    auto v2 = bytes;
    v2[4] = 2;
    expect_throw_containing([&] { decode_stack(v2); }, "unsupported version");

    EXPECT_THROW(write_stack(s, "/nonexistent-dir/x.dstk"), DataError);
    EXPECT_THROW(read_stack("/nonexistent-dir/x.dstk"), DataError);
}

TEST(Dstk, RejectsOversizedDimensionsInHeader)
{
    Stack s(TimeGrid{Date{0}, 6, 1}, GeoTransform{}, 1, 1, 0.0f);
    auto bytes = encode_stack(s);
    // T = H = W = 0x10000 -> 2^48 voxels
    for (std::size_t off : {8u, 12u, 16u}) {
        bytes[off] = 0;
        bytes[off + 1] = 0;
        bytes[off + 2] = 1;
        bytes[off + 3] = 0;
    }
    expect_throw_containing([&] { decode_stack(bytes); }, "overflow");
}

TEST(PointsCsv, ParsesMissingCells)
{
    auto set = parse_points_csv("id,easting,northing,2020-01-01,2020-01-07,2020-01-19\n"
                                "P1,10,20,1.5,,3\n"
                                "P2,11.5,21,NaN,2,4\n");
    ASSERT_EQ(set.points.size(), 2u);
    EXPECT_FALSE(set.regularized);
    EXPECT_EQ(set.grid.step_days, 1);
    EXPECT_EQ(set.acquisition_slots, (std::vector<std::int32_t>{0, 6, 18}));
    EXPECT_TRUE(std::isnan(set.points[0].values[1]));
    EXPECT_TRUE(std::isnan(set.points[1].values[0]));
    EXPECT_EQ(set.points[1].easting, 11.5);
    std::size_t nans = 0;
    for (auto& p : set.points)
        for (double v : p.values)
            nans += std::isnan(v);
    EXPECT_EQ(nans, 2u);
}

TEST(PointsCsv, Errors)
{
    const std::string header = "id,easting,northing,2020-01-01,2020-01-07\n";
    expect_throw_containing([&] { parse_points_csv(header + "P1,0,0,1,2\nP1,1,1,3,4\n"); }, "duplicate id");
    expect_throw_containing([&] { parse_points_csv(header + "P1,0,0,1,abc\n"); }, "row 2, column 5");
    expect_throw_containing([&] { parse_points_csv("id,easting,northing,2020-01-07,2020-01-01\n"); },
                            "strictly increasing");
    expect_throw_containing([&] { parse_points_csv(header + "P1,0,0,1\n"); }, "cells");
    expect_throw_containing([&] { parse_points_csv(header + "P1,0,0,1,20000\n"); }, "sanity bound");
}

TEST(PointsCsv, WriteReadIsIdentityOnRandomSets)
{
    std::mt19937 rng(11);
    std::normal_distribution<double> val(0.0, 30.0);
    std::uniform_real_distribution<double> coord(0.0, 1e5), unit(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        PointSet set;
        std::vector<std::int32_t> slots{0};
        const int n_dates = 1 + static_cast<int>(unit(rng) * 20);
        for (int d = 1; d < n_dates; ++d)
            slots.push_back(slots.back() + 1 + static_cast<int>(unit(rng) * 12));
        set.grid = TimeGrid{Date{16000 + trial}, 1, slots.back() + 1};
        set.acquisition_slots = slots;
        const int n_points = static_cast<int>(unit(rng) * 10);
        for (int i = 0; i < n_points; ++i) {
            PointSeries p{"pt" + std::to_string(i), coord(rng), coord(rng), {}};
            for (int d = 0; d < n_dates; ++d)
                p.values.push_back(unit(rng) < 0.2 ? std::numeric_limits<double>::quiet_NaN() : val(rng));
            set.points.push_back(p);
        }
        auto back = parse_points_csv(format_points_csv(set));
        EXPECT_EQ(back, set) << "trial " << trial;
    }
}

TEST(Detections, CsvAndPgm)
{
    DetectionMap m(2, 2, 3);
    m.set(1, 0, 2);
    m.set(0, 1, 1);
    auto csv = format_detections_csv(m);
    EXPECT_EQ(csv, "t,row,col\n0,1,1\n1,0,2\n");
    EXPECT_EQ(parse_detections_csv(csv, 2, 2, 3), m);
    EXPECT_THROW(parse_detections_csv("t,row,col\n5,0,0\n", 2, 2, 3), DataError);

    auto pgm = format_detection_pgm(m, 0);
    EXPECT_EQ(pgm.substr(0, 11), "P5\n3 2\n255\n");
    ASSERT_EQ(pgm.size(), 11u + 6u);
    EXPECT_EQ(static_cast<unsigned char>(pgm[11 + 4]), 255);
    EXPECT_EQ(pgm[11 + 0], 0);
}
