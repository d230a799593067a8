// Copyright (c) pwhile contributors.
// SPDX-License-Identifier: Apache-2.0
//
// Exercises the shared-library surface only: opaque handles, status codes,
// string ownership.
#include <doctest.h>

#include <fstream>
#include <sstream>
#include <string>

#include "pwhile/pwhile_c.h"

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Handle {
    pw_program* p = nullptr;
    ~Handle() { pw_program_free(p); }
};

}  // namespace

TEST_CASE("parse errors carry positions and status 3") {
    Handle h;
    char* err = nullptr;
    pw_status st = pw_program_parse("while [x >= 0] (x > 0) { tick(1); x := }", &h.p, &err);
    CHECK(st == PW_ERR_PARSE);
    REQUIRE(err != nullptr);
    CHECK(std::string(err).find("1:") != std::string::npos);
    pw_string_free(err);
}

TEST_CASE("parse and print round trip through the C API") {
    Handle h;
    char* err = nullptr;
    REQUIRE(pw_program_parse("tick(1); x := x - 1", &h.p, &err) == PW_OK);
    char* text = pw_program_print(h.p);
    CHECK(std::string(text) == "tick(1); x := x - 1");
    pw_string_free(text);
}

TEST_CASE("analyze certifies the countdown corpus file") {
    Handle h;
    char* err = nullptr;
    std::string source = slurp("corpus/countdown.pw");
    REQUIRE(pw_program_parse(source.c_str(), &h.p, &err) == PW_OK);
    char* report = nullptr;
    pw_status st = pw_analyze(h.p, R"({"json": true, "path": "corpus/countdown.pw"})", &report,
                              &err);
    CHECK(st == PW_OK);
    REQUIRE(report != nullptr);
    std::string text(report);
    CHECK(text.find("\"status\": \"certified\"") != std::string::npos);
    CHECK(text.find("\"bound\": \"nat(x)\"") != std::string::npos);
    pw_string_free(report);
}

TEST_CASE("analyze reports failure for the nonlinear guard") {
    Handle h;
    char* err = nullptr;
    std::string source = slurp("corpus/unsupported_nonlinear_guard.pw");
    REQUIRE(pw_program_parse(source.c_str(), &h.p, &err) == PW_OK);
    char* report = nullptr;
    pw_status st = pw_analyze(h.p, "{}", &report, &err);
    CHECK(st == PW_ERR_ANALYSIS);
    REQUIRE(report != nullptr);
    std::string text(report);
    CHECK(text.find("failed") != std::string::npos);
    CHECK(text.find("unsupported") != std::string::npos);
    pw_string_free(report);
}

TEST_CASE("analyze JSON reports are byte-identical across runs") {
    for (const char* path : {"corpus/countdown.pw", "corpus/geometric.pw"}) {
        Handle h;
        char* err = nullptr;
        std::string source = slurp(path);
        REQUIRE(pw_program_parse(source.c_str(), &h.p, &err) == PW_OK);
        std::string first, second;
        for (std::string* out : {&first, &second}) {
            char* report = nullptr;
            REQUIRE(pw_analyze(h.p, R"({"json": true})", &report, &err) == PW_OK);
            *out = report;
            pw_string_free(report);
        }
        CHECK(first == second);
    }
}

TEST_CASE("simulate returns exact oracle info for the countdown") {
    Handle h;
    char* err = nullptr;
    std::string source = slurp("corpus/countdown.pw");
    REQUIRE(pw_program_parse(source.c_str(), &h.p, &err) == PW_OK);
    char* report = nullptr;
    pw_status st = pw_simulate(
        h.p, R"({"store": {"x": 3}, "samples": 200, "seed": 1, "json": true})", &report, &err);
    CHECK(st == PW_OK);
    std::string text(report);
    CHECK(text.find("\"mean_cost\": \"3\"") != std::string::npos);
    CHECK(text.find("\"abort_rate\": \"0\"") != std::string::npos);
    CHECK(text.find("\"oracle_lower\": \"3\"") != std::string::npos);
    CHECK(text.find("\"oracle_exact\": true") != std::string::npos);
    pw_string_free(report);
}

TEST_CASE("simulate: abort-demo aborts every run") {
    Handle h;
    char* err = nullptr;
    std::string source = slurp("corpus/abort_demo.pw");
    REQUIRE(pw_program_parse(source.c_str(), &h.p, &err) == PW_OK);
    char* report = nullptr;
    REQUIRE(pw_simulate(h.p, R"({"samples": 50, "json": true})", &report, &err) == PW_OK);
    std::string text(report);
    CHECK(text.find("\"abort_rate\": \"1\"") != std::string::npos);
    pw_string_free(report);
}

TEST_CASE("check certifies nat(x) and refutes half of it") {
    Handle h;
    char* err = nullptr;
    std::string source = slurp("corpus/countdown.pw");
    REQUIRE(pw_program_parse(source.c_str(), &h.p, &err) == PW_OK);

    char* report = nullptr;
    pw_status ok = pw_check(h.p, "loop1: nat(x)\n", "{}", &report, &err);
    CHECK(ok == PW_OK);
    CHECK(std::string(report).find("certified") != std::string::npos);
    pw_string_free(report);

    report = nullptr;
    pw_status bad = pw_check(h.p, "loop1: 1/2*nat(x)\n", R"({"json": true})", &report, &err);
    CHECK(bad == PW_ERR_ANALYSIS);
    std::string text(report);
    CHECK(text.find("refuted") != std::string::npos);
    CHECK(text.find("\"x\": \"1\"") != std::string::npos);
    pw_string_free(report);

    report = nullptr;
    pw_status unknown_label = pw_check(h.p, "loop9: nat(x)\n", "{}", &report, &err);
    CHECK(unknown_label == PW_ERR_INVALID);
    pw_string_free(report);
}

TEST_CASE("check: empty invariant file on a loop-free program is vacuously certified") {
    Handle h;
    char* err = nullptr;
    REQUIRE(pw_program_parse("tick(1); x := 2", &h.p, &err) == PW_OK);
    char* report = nullptr;
    CHECK(pw_check(h.p, "", "{}", &report, &err) == PW_OK);
    pw_string_free(report);
}

TEST_CASE("bad config json yields PW_ERR_INVALID") {
    Handle h;
    char* err = nullptr;
    REQUIRE(pw_program_parse("skip", &h.p, &err) == PW_OK);
    char* report = nullptr;
    pw_status st = pw_analyze(h.p, "{not json", &report, &err);
    CHECK(st == PW_ERR_INVALID);
    REQUIRE(err != nullptr);
    pw_string_free(err);
}
