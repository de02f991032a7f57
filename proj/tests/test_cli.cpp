#define DOCTEST_CONFIG_IMPLEMENT
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

namespace {

std::string g_binary;

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CliResult cli(const std::string& args) {
  std::string cmd = g_binary + " " + args + " >/tmp/quill_cli_out.txt 2>/tmp/quill_cli_err.txt";
  int status = std::system(cmd.c_str());
  CliResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp("/tmp/quill_cli_out.txt");
  r.err = slurp("/tmp/quill_cli_err.txt");
  return r;
}

std::string write_source(const std::string& text) {
  std::string path = "/tmp/quill_cli_case.ql";
  std::ofstream(path) << text;
  return path;
}

}  // namespace

TEST_CASE("run prints the value") {
  std::string f = write_source("def main = (\\x -> x) (inl (\\y -> y));\n");
  CliResult r = cli("run " + f);
  CHECK(r.code == 0);
  CHECK(r.out == "inl <fun>\n");
}

TEST_CASE("run --audit reports a clean audit") {
  std::string f = write_source("def main = let g = \\x -> x in g (g (inl (\\z -> z)));\n");
  CliResult r = cli("run --audit " + f);
  CHECK(r.code == 0);
  CHECK(r.out.find("inl <fun>\n") == 0);
  CHECK(r.out.find("audit: ok") != std::string::npos);
}

TEST_CASE("run --trace prints one line per rule") {
  std::string f = write_source("def main = (\\x -> x) (inl (\\y -> y));\n");
  CliResult r = cli("run --trace " + f);
  CHECK(r.code == 0);
  CHECK(r.out.find("LAM") != std::string::npos);
  CHECK(r.out.find("APP") != std::string::npos);
  CHECK(r.out.find("INL") != std::string::npos);
  // With --trace the value keeps its indices.
  CHECK(r.out.find("^") != std::string::npos);
}

TEST_CASE("infer prints canonical schemes") {
  std::string f = write_source("def k = \\x -> \\y -> x;\n");
  CliResult r = cli("infer " + f);
  CHECK(r.code == 0);
  CHECK(r.out == "k : forall t u f g. (Un u, t >= g) => t -f> u -g> t\n");
}

TEST_CASE("infer output is byte-identical across runs") {
  std::string f = write_source(
      "def id = \\x -> x;\n"
      "def k = \\x -> \\y -> x;\n"
      "def app = \\f -> \\x -> f x;\n");
  CliResult a = cli("infer " + f);
  CliResult b = cli("infer " + f);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
}

TEST_CASE("source errors exit 2") {
  CHECK(cli("infer " + write_source("def w = \\x ->\n")).code == 2);
  CHECK(cli("infer " + write_source("def w = y;\n")).code == 2);
  CHECK(cli("infer /tmp/does_not_exist.ql").code == 2);
}

TEST_CASE("type errors exit 1 with a diagnostic") {
  std::string f = write_source(
      "con MkTok : ((exists u. u) ->* Tok);\n"
      "def main = (\\x -> \\y -> y) (MkTok (\\z -> z));\n");
  CliResult r = cli("infer " + f);
  CHECK(r.code == 1);
  CHECK(r.err.find("Tok") != std::string::npos);
  CHECK(cli("run " + f).code == 1);
}

TEST_CASE("check validates elaborations") {
  std::string f = write_source("def id = \\x -> x;\ndef k = \\x -> \\y -> x;\n");
  CliResult r = cli("check " + f);
  CHECK(r.code == 0);
  CHECK(r.out.find("id : ok") != std::string::npos);
  CHECK(r.out.find("k : ok") != std::string::npos);
}

TEST_CASE("corpus passes end to end") {
  CliResult r = cli("corpus");
  CHECK(r.code == 0);
  CHECK(r.out.find("FAIL") == std::string::npos);
  CHECK(r.out.find("PASS") != std::string::npos);
}

TEST_CASE("bad usage is rejected") {
  CHECK(cli("").code != 0);
  CHECK(cli("frobnicate x").code != 0);
}

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: test_cli <path-to-quill-binary>\n");
    return 2;
  }
  g_binary = argv[1];
  doctest::Context ctx;
  ctx.applyCommandLine(argc - 1, argv + 1);
  return ctx.run();
}
