// End-to-end tests of the command-line tool: golden output comparisons,
// witness round trips, determinism, and exit codes.
//
// Arguments: <path to picmod binary> <data dir> <golden dir>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace {

int failures = 0;

struct RunResult {
  int exitCode = -1;
  std::string output;
};

RunResult run(const std::string& cmd) {
  RunResult res;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return res;
  char buf[4096];
  while (size_t n = fread(buf, 1, sizeof(buf), pipe)) res.output.append(buf, n);
  const int status = pclose(pipe);
  res.exitCode = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

std::string readFile(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void writeFile(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

void expect(bool ok, const std::string& what) {
  if (ok) {
    std::printf("ok: %s\n", what.c_str());
  } else {
    std::printf("FAILED: %s\n", what.c_str());
    ++failures;
  }
}

void expectGolden(const RunResult& res, const std::string& goldenPath, const std::string& what) {
  const std::string want = readFile(goldenPath);
  if (res.output != want) {
    std::printf("FAILED: %s\n--- got ---\n%s--- want ---\n%s---\n", what.c_str(),
                res.output.c_str(), want.c_str());
    ++failures;
    return;
  }
  std::printf("ok: %s\n", what.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 4) {
    std::fprintf(stderr, "usage: cli_tests <binary> <data dir> <golden dir>\n");
    return 2;
  }
  const std::string bin = argv[1], data = argv[2], golden = argv[3];
  const std::string tmp = "/tmp/picmod_cli_test";
  std::system(("mkdir -p " + tmp).c_str());

  // golden outputs for the worked examples
  {
    RunResult r = run(bin + " pic " + data + "/sec2_counterexample.json");
    expect(r.exitCode == 0, "pic exits 0");
    expectGolden(r, golden + "/pic_sec2.txt", "pic output on the section 2 counterexample");
  }
  {
    RunResult r = run(bin + " exists-unitary " + data + "/examples_2_5.json");
    expect(r.exitCode == 0, "exists-unitary (2.5) exits 0");
    expectGolden(r, golden + "/exists_2_5.txt", "exists-unitary NO certificate, Example 2.5");
  }
  {
    RunResult r = run(bin + " exists-unitary " + data + "/example_3_3.json");
    expect(r.exitCode == 0, "exists-unitary (3.3) exits 0");
    expectGolden(r, golden + "/exists_3_3.txt", "exists-unitary NO certificate, Example 3.3");
  }
  {
    RunResult r = run(bin + " theorem35 " + data + "/examples_2_5.json");
    expect(r.exitCode == 0, "theorem35 exits 0");
    expectGolden(r, golden + "/theorem35_2_5.txt", "theorem35 output, Example 2.5 module");
  }
  {
    writeFile(tmp + "/both_gaps.json", R"({"blocks":[1,2],"mult":[1,1]})");
    RunResult r1 = run(bin + " phie " + tmp + "/both_gaps.json");
    expectGolden(r1, golden + "/phie_both_gaps.txt", "phie output on n=(1,2), m=(1,1)");
    RunResult r2 = run(bin + " straut " + tmp + "/both_gaps.json");
    expectGolden(r2, golden + "/straut_both_gaps.txt", "straut output on n=(1,2), m=(1,1)");
  }

  // witness round trip through --check-witness
  {
    writeFile(tmp + "/yes.json", R"({"blocks":[1,1],"mult":[2,1],"perm":[1,2]})");
    RunResult r = run(bin + " exists-unitary " + tmp + "/yes.json");
    expect(r.exitCode == 0 && r.output.rfind("YES\n", 0) == 0, "identity instance answers YES");
    const size_t nl = r.output.find('\n');
    const std::string witness = r.output.substr(nl + 1);
    writeFile(tmp + "/witness.json", witness);
    RunResult rv = run(bin + " exists-unitary " + tmp + "/yes.json --check-witness " + tmp +
                       "/witness.json");
    expect(rv.exitCode == 0 && rv.output == "WITNESS VALID\n",
           "printed witness re-validates through --check-witness");
    // a corrupted witness is rejected with exit 1
    std::string bad = witness;
    const size_t pos = bad.find("\"perm\":[1,2]");
    if (pos != std::string::npos) bad.replace(pos, 12, "\"perm\":[2,1]");
    writeFile(tmp + "/bad_witness.json", bad);
    RunResult rb = run(bin + " exists-unitary " + tmp + "/yes.json --check-witness " + tmp +
                       "/bad_witness.json 2>/dev/null");
    expect(rb.exitCode != 0, "corrupted witness is rejected");
  }

  // verify: golden runs only, deterministic output, exit 0
  {
    RunResult r1 = run(bin + " verify --count 0");
    RunResult r2 = run(bin + " verify --count 0");
    expect(r1.exitCode == 0, "verify --count 0 exits 0");
    expect(r1.output == r2.output, "verify output is byte-identical across runs");
    expect(r1.output.find("\"summary\"") != std::string::npos, "verify prints a summary");
    expectGolden(r1, golden + "/verify_count0.txt", "verify --count 0 golden report");
  }

  // exit codes: usage errors are 2
  {
    RunResult r = run(bin + " verify --bogus-flag 2>/dev/null");
    expect(r.exitCode == 2, "malformed flag exits 2");
    RunResult r2 = run(bin + " pic /nonexistent/file.json 2>/dev/null");
    expect(r2.exitCode == 2, "missing file exits 2");
    writeFile(tmp + "/bad_mult.json", R"({"blocks":[1,1],"mult":[1]})");
    RunResult r3 = run(bin + " phie " + tmp + "/bad_mult.json 2>/dev/null");
    expect(r3.exitCode == 2, "validation error exits 2");
    RunResult r4 = run(bin + " phie " + tmp + "/bad_mult.json 2>&1 1>/dev/null");
    expect(r4.output.find("mult") != std::string::npos, "validation error names the field");
  }

  if (failures) {
    std::printf("%d CLI test(s) failed\n", failures);
    return 1;
  }
  std::printf("all CLI tests passed\n");
  return 0;
}
