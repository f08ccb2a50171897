// End-to-end checks of the CLI binary: exit codes, artifacts, key output
// lines.  argv[1] is the path to the built executable.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int failures = 0;

void expect(bool ok, const std::string& what) {
    if (!ok) {
        std::cerr << "[FAIL] " << what << "\n";
        ++failures;
    }
}

int run(const std::string& cmd, std::string* output = nullptr) {
    const std::string out_file = "/tmp/flexq_smoke_out.txt";
    const int rc = std::system((cmd + " >" + out_file + " 2>&1").c_str());
    if (output) {
        std::ifstream f(out_file);
        std::ostringstream buf;
        buf << f.rdbuf();
        *output = buf.str();
    }
    return WEXITSTATUS(rc);
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream f(p);
    f << text;
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: flexq_cli_smoke <path-to-cli>\n";
        return 1;
    }
    const std::string cli = argv[1];
    const fs::path dir = "/tmp/flexq_smoke";
    fs::remove_all(dir);
    fs::create_directories(dir);

    write_file(dir / "model.cfg",
               "lambda = 5\nmu_low = 3\nmu_high = 5\nservice_cost = 6\nreward = 2\nbeta = 0.5\n"
               "holding.variant = power\nholding.K = 1\nholding.m = 2\n");

    std::string out;

    // missing config file -> config error
    expect(run(cli + " solve --config " + (dir / "nope.cfg").string(), &out) == 2,
           "missing config exits 2");

    // malformed config line -> config error naming the line
    write_file(dir / "bad.cfg", "lambda = 5\nthis is not a key value pair\n");
    expect(run(cli + " solve --config " + (dir / "bad.cfg").string(), &out) == 2,
           "malformed config exits 2");
    expect(out.find(":2") != std::string::npos, "malformed config error names line 2");

    // missing key -> config error naming the key
    write_file(dir / "partial.cfg", "lambda = 5\nmu_low = 3\n");
    expect(run(cli + " solve --config " + (dir / "partial.cfg").string(), &out) == 2,
           "missing key exits 2");
    expect(out.find("mu_high") != std::string::npos, "missing key is named");

    // solve: verdict line and CSV artifact
    expect(run(cli + " solve --config " + (dir / "model.cfg").string() + " --out " + dir.string(),
               &out) == 0,
           "solve exits 0");
    expect(out.find("flex=valueless Bs>=Bd+1") != std::string::npos,
           "solve prints the valueless verdict for R <= c/delta");
    expect(fs::exists(dir / "values.csv"), "solve writes values.csv");
    {
        std::ifstream f(dir / "values.csv");
        std::string line;
        std::getline(f, line);
        expect(!line.empty() && line[0] == '#', "values.csv starts with metadata comments");
    }

    // overrides flip the verdict for a large reward
    expect(run(cli + " solve --config " + (dir / "model.cfg").string() + " --set reward=5 --out " +
                   dir.string(),
               &out) == 0,
           "solve with override exits 0");
    expect(out.find("flex=active Bs<=Bd") != std::string::npos,
           "override to R=5 prints the active verdict");

    // flexibility
    expect(run(cli + " flexibility --config " + (dir / "model.cfg").string() + " --out " +
                   dir.string(),
               &out) == 0,
           "flexibility exits 0");
    expect(fs::exists(dir / "flexibility.csv"), "flexibility writes flexibility.csv");

    // sweep, twice: CSV bytes must be identical across runs
    write_file(dir / "sweep.cfg",
               "lambda = 5\nmu_low = 3\nmu_high = 5\nservice_cost = 6\nreward = 2\nbeta = 0.5\n"
               "holding.variant = power\nholding.K = 1\nholding.m = 2\n"
               "sweep.axis = R\nsweep.values = 1,2,3,4\n");
    expect(run(cli + " sweep --config " + (dir / "sweep.cfg").string() + " --out " + dir.string(),
               &out) == 0,
           "sweep exits 0");
    expect(fs::exists(dir / "sweep.csv"), "sweep writes sweep.csv");
    {
        std::ifstream f1(dir / "sweep.csv");
        std::ostringstream first;
        first << f1.rdbuf();
        run(cli + " sweep --config " + (dir / "sweep.cfg").string() + " --out " + dir.string());
        std::ifstream f2(dir / "sweep.csv");
        std::ostringstream second;
        second << f2.rdbuf();
        expect(first.str() == second.str() && !first.str().empty(),
               "sweep.csv is byte-stable across runs");
    }

    // critical-r
    write_file(dir / "crit.cfg",
               "lambda = 5\nmu_low = 3\nmu_high = 5\nservice_cost = 6\nreward = 0\nbeta = 0.5\n"
               "holding.variant = power\nholding.K = 1\nholding.m = 2\n"
               "critical.r_min = 3\ncritical.r_max = 5\ncritical.resolution = 0.25\n");
    expect(run(cli + " critical-r --config " + (dir / "crit.cfg").string() + " --out " +
                   dir.string(),
               &out) == 0,
           "critical-r exits 0");
    expect(out.find("r_tilde") != std::string::npos, "critical-r prints r_tilde");
    expect(fs::exists(dir / "critical_scan.csv"), "critical-r writes the scan");

    // average
    write_file(dir / "avg.cfg",
               "lambda = 2\nmu_low = 3\nmu_high = 6\nservice_cost = 8\nreward = 4\nbeta = 1\n"
               "holding.variant = power\nholding.K = 1\nholding.m = 2\n"
               "average.max_stages = 60\n");
    expect(run(cli + " average --config " + (dir / "avg.cfg").string() + " --out " + dir.string(),
               &out) == 0,
           "average exits 0");
    expect(out.find("g_star") != std::string::npos, "average prints g_star");
    expect(fs::exists(dir / "average_trace.csv"), "average writes the gain trace");

    // simulate: estimate line is mean,half_width,reps
    expect(run(cli + " simulate --config " + (dir / "model.cfg").string() +
                   " --set sim.replications=200 --seed 42 --out " + dir.string(),
               &out) == 0,
           "simulate exits 0");
    {
        std::istringstream lines(out);
        std::string line;
        bool found = false;
        while (std::getline(lines, line)) {
            double mean, hw;
            long reps;
            if (std::sscanf(line.c_str(), "%lf,%lf,%ld", &mean, &hw, &reps) == 3 && reps == 200)
                found = true;
        }
        expect(found, "simulate prints mean,half_width,reps");
    }

    // byte-stable output for a fixed seed and config
    std::string out2;
    run(cli + " simulate --config " + (dir / "model.cfg").string() +
            " --set sim.replications=200 --seed 42 --out " + dir.string(),
        &out2);
    expect(out == out2, "simulate output is byte-stable for a fixed seed");

    // numerical-failure exit code: a scan with no verdict change
    write_file(dir / "nocross.cfg",
               "lambda = 5\nmu_low = 3\nmu_high = 5\nservice_cost = 6\nreward = 0\nbeta = 0.5\n"
               "holding.variant = power\nholding.K = 1\nholding.m = 2\n"
               "critical.r_min = 0.1\ncritical.r_max = 0.8\ncritical.resolution = 0.2\n");
    expect(run(cli + " critical-r --config " + (dir / "nocross.cfg").string() + " --out " +
                   dir.string(),
               &out) == 3,
           "no-crossing scan exits 3");

    if (failures == 0) std::puts("cli smoke: all checks passed");
    return failures == 0 ? 0 : 1;
}
