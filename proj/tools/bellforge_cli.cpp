// Copyright 2026 The bellforge authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end. Talks to the library exclusively through the C
// API in bellforge.h.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bellforge.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitVerify = 3;
constexpr int kExitSolver = 4;

struct OwnedString {
    char* s = nullptr;
    ~OwnedString() { bf_string_free(s); }
    std::string str() const { return s ? s : ""; }
};

struct FamilyHandle {
    bf_family* f = nullptr;
    ~FamilyHandle() { bf_family_free(f); }
};

int exitCode(bf_status st) {
    switch (st) {
        case BF_OK:
            return kExitOk;
        case BF_ERR_USAGE:
            return kExitUsage;
        case BF_ERR_VERIFY:
            return kExitVerify;
        default:
            return kExitSolver;
    }
}

int fail(bf_status st) {
    std::cerr << "error: " << bf_last_error() << "\n";
    return exitCode(st);
}

/// Family parameter flags; only flags the user set are forwarded.
struct ParamFlags {
    std::vector<std::pair<std::string, double>> entries;

    void attach(CLI::App* cmd) {
        for (const char* name :
             {"theta", "b", "b1", "b2", "q", "c", "n", "a1", "a2", "w1", "lambda2"}) {
            std::string key = name;
            cmd->add_option_function<double>(
                   "--" + key, [this, key](double v) { entries.emplace_back(key, v); },
                   "family parameter " + key)
                ->expected(1);
        }
    }

    bf_status build(const std::string& kind, FamilyHandle& fam) const {
        std::vector<const char*> keys;
        std::vector<double> vals;
        for (const auto& [k, v] : entries) {
            keys.push_back(k.c_str());
            vals.push_back(v);
        }
        return bf_family_build(kind.c_str(), keys.data(), vals.data(), int(keys.size()), &fam.f);
    }
};

int writeOutput(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return kExitOk;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        std::cerr << "error: cannot open output file " << path << "\n";
        return kExitUsage;
    }
    out << text;
    return kExitOk;
}

/// CSV (header + rows) -> JSON array of row objects; "nan" cells become null.
std::string csvToJson(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    std::vector<std::string> cols;
    std::istringstream hs(line);
    for (std::string c; std::getline(hs, c, ',');) cols.push_back(c);
    std::string out = "[";
    bool firstRow = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (!firstRow) out += ",";
        firstRow = false;
        out += "\n  {";
        std::istringstream rs(line);
        std::string cell;
        for (size_t i = 0; i < cols.size(); ++i) {
            std::getline(rs, cell, ',');
            if (i) out += ", ";
            out += "\"" + cols[i] + "\": " + (cell == "nan" ? "null" : cell);
        }
        out += "}";
    }
    out += "\n]\n";
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bellforge: Bell inequalities tailored to quantum states"};
    app.require_subcommand(1);
    app.set_config("--config", "", "flat key-value config file (keys: <command>.<flag>)");
    app.set_version_flag("--version", []() { return std::string(bf_version()); });

    std::string kind, level = "1ab", outPath, format = "json", certPath, mode = "fig1",
                scanParam;
    double tol = 1e-9;
    int jobs = 1;
    double qmin = 0.0, qmax = 4.0, qstep = 0.05;
    double theta = 0.39269908169872414;  // pi/8
    int grid = 21;
    double from = 0.0, to = 0.0, step = 1.0;

    auto addCommon = [&](CLI::App* cmd, bool needKind) {
        cmd->fallthrough();  // lets --config after the subcommand reach the app
        auto* k = cmd->add_option("--kind", kind, "family kind");
        if (needKind) k->required();
        cmd->add_option("--out", outPath, "output file (default stdout)");
        cmd->add_option("--format", format, "output format")
            ->check(CLI::IsMember({"json", "csv"}));
        cmd->add_option("--jobs", jobs, "worker pool size")
            ->envname("BELLFORGE_JOBS")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--level", level, "NPA hierarchy level")
            ->check(CLI::IsMember({"1", "1ab", "2"}));
        cmd->add_option("--tol", tol, "verification tolerance");
    };

    ParamFlags familyParams, certifyParams, selftestParams, scanParams;

    CLI::App* cmdFamily = app.add_subcommand("family", "build a family instance");
    addCommon(cmdFamily, true);
    familyParams.attach(cmdFamily);

    CLI::App* cmdScan = app.add_subcommand("scan", "emit figure/scan datasets as CSV");
    addCommon(cmdScan, false);
    scanParams.attach(cmdScan);
    cmdScan->add_option("--mode", mode, "scan mode")
        ->check(CLI::IsMember({"fig1", "fig4", "param"}));
    cmdScan->add_option("--qmin", qmin, "fig1: first q");
    cmdScan->add_option("--qmax", qmax, "fig1: last q");
    cmdScan->add_option("--qstep", qstep, "fig1: q step");
    cmdScan->add_option("--grid", grid, "fig4: cells per axis")->check(CLI::PositiveNumber);
    cmdScan->add_option("--param", scanParam, "param mode: name of the swept parameter");
    cmdScan->add_option("--from", from, "param mode: range start");
    cmdScan->add_option("--to", to, "param mode: range end");
    cmdScan->add_option("--step", step, "param mode: range step");

    CLI::App* cmdCertify = app.add_subcommand("certify", "verify certificate + bounds sandwich");
    addCommon(cmdCertify, true);
    certifyParams.attach(cmdCertify);
    cmdCertify->add_option("--cert", certPath, "certificate JSON file replacing the built one");

    CLI::App* cmdSelftest = app.add_subcommand("selftest", "swap-gate self-test at the ideal point");
    addCommon(cmdSelftest, true);
    selftestParams.attach(cmdSelftest);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    if (cmdFamily->parsed()) {
        FamilyHandle fam;
        if (bf_status st = familyParams.build(kind, fam); st != BF_OK) return fail(st);
        if (format == "csv") {
            OwnedString table;
            if (bf_status st = bf_family_table(fam.f, &table.s); st != BF_OK) return fail(st);
            return writeOutput(outPath, table.str());
        }
        OwnedString json;
        if (bf_status st = bf_family_json(fam.f, &json.s); st != BF_OK) return fail(st);
        OwnedString hess;
        bf_family_hessian(fam.f, &hess.s);  // optional: absent when not stationary
        std::string text = "{\n\"instance\": " + json.str() + ",\n\"hessian\": " +
                           (hess.s ? hess.str() : std::string("null")) + "\n}\n";
        return writeOutput(outPath, text);
    }

    if (cmdScan->parsed()) {
        if (!cmdScan->count("--format")) format = "csv";
        OwnedString csv;
        bf_status st;
        if (mode == "fig1") {
            if (!cmdScan->count("--level")) level = "2";
            st = bf_scan_fig1(qmin, qmax, qstep, level.c_str(), jobs, &csv.s);
        } else if (mode == "fig4") {
            if (!cmdScan->count("--level")) level = "1ab";
            for (const auto& [k, v] : scanParams.entries)
                if (k == "theta") theta = v;
            st = bf_scan_fig4(theta, grid, level.c_str(), jobs, &csv.s);
        } else {
            if (kind.empty() || scanParam.empty()) {
                std::cerr << "error: param mode needs --kind and --param\n";
                return kExitUsage;
            }
            std::vector<const char*> keys;
            std::vector<double> vals;
            for (const auto& [k, v] : scanParams.entries) {
                keys.push_back(k.c_str());
                vals.push_back(v);
            }
            st = bf_scan_family(kind.c_str(), keys.data(), vals.data(), int(keys.size()),
                                scanParam.c_str(), from, to, step, level.c_str(), jobs, &csv.s);
        }
        if (st != BF_OK) return fail(st);
        return writeOutput(outPath, format == "json" ? csvToJson(csv.str()) : csv.str());
    }

    if (cmdCertify->parsed()) {
        FamilyHandle fam;
        if (bf_status st = certifyParams.build(kind, fam); st != BF_OK) return fail(st);
        std::string certJson;
        if (!certPath.empty()) {
            std::ifstream in(certPath, std::ios::binary);
            if (!in) {
                std::cerr << "error: cannot read certificate file " << certPath << "\n";
                return kExitUsage;
            }
            std::ostringstream buf;
            buf << in.rdbuf();
            certJson = buf.str();
        }
        OwnedString report;
        int pass = 0;
        bf_status st = bf_family_certify(fam.f, certPath.empty() ? nullptr : certJson.c_str(),
                                         level.c_str(), tol, &report.s, &pass);
        if (st != BF_OK) return fail(st);
        int rc = writeOutput(outPath, report.str() + "\n");
        if (rc != kExitOk) return rc;
        return pass ? kExitOk : kExitVerify;
    }

    if (cmdSelftest->parsed()) {
        FamilyHandle fam;
        if (bf_status st = selftestParams.build(kind, fam); st != BF_OK) return fail(st);
        OwnedString report;
        double fidelity = 0.0;
        bf_status st = bf_family_selftest(fam.f, &report.s, &fidelity);
        if (st != BF_OK) return fail(st);
        int rc = writeOutput(outPath, report.str() + "\n");
        if (rc != kExitOk) return rc;
        int single = 0;
        bf_family_single_square(fam.f, &single);
        if (single) {
            std::cerr << "warning: single_square limit point; the fidelity carries no "
                         "self-testing claim\n";
            return kExitOk;
        }
        return fidelity >= 1.0 - 1e-6 ? kExitOk : kExitVerify;
    }

    return kExitUsage;
}
