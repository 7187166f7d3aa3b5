// wt: build, update and query wavelet trie indexes over string logs.
//
// Exit codes: 0 ok, 1 other error, 2 out of range, 3 corrupt index,
// 4 operation not supported by the index variant.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "wtrie/oracle.hpp"
#include "wtrie/string_index.hpp"

namespace fs = std::filesystem;
using namespace wtrie;

namespace {

enum exit_code { kOk = 0, kOther = 1, kRange = 2, kCorrupt = 3, kVariant = 4 };

struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw io_error("read failed: " + path);
  return std::move(ss).str();
}

// Temp file in the target directory, then rename over the target.
void write_file_atomic(const std::string& path, const std::string& data) {
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot create " + tmp.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw io_error("write failed: " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw io_error("cannot rename onto " + path);
  }
}

// LF-delimited lines; a final LF is optional.
std::vector<std::string> split_lines(const std::string& data) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start < data.size()) {
    std::size_t end = data.find('\n', start);
    if (end == std::string::npos) end = data.size();
    out.emplace_back(data, start, end - start);
    start = end + 1;
  }
  return out;
}

// u32 little-endian length + bytes, repeated.
std::vector<std::string> split_length_prefixed(const std::string& data) {
  std::vector<std::string> out;
  std::size_t p = 0;
  while (p < data.size()) {
    if (data.size() - p < 4) throw io_error("length-prefixed input: truncated length");
    std::uint32_t len = 0;
    for (int i = 0; i < 4; ++i) len |= std::uint32_t{static_cast<unsigned char>(data[p + i])} << (8 * i);
    p += 4;
    if (data.size() - p < len) throw io_error("length-prefixed input: truncated record");
    out.emplace_back(data, p, len);
    p += len;
  }
  return out;
}

std::vector<std::string> read_input(const std::string& path, bool length_prefixed) {
  const std::string data = read_file(path);
  return length_prefixed ? split_length_prefixed(data) : split_lines(data);
}

std::string escape(std::string_view s) {
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned char c : s) {
    if (c == '\\') {
      out += "\\\\";
    } else if (c >= 0x20 && c < 0x7f) {
      out.push_back(static_cast<char>(c));
    } else {
      out += "\\x";
      out.push_back(hex[c >> 4]);
      out.push_back(hex[c & 15]);
    }
  }
  return out;
}

// Inverse of escape() for command-line arguments: \xHH and \\.
std::string unescape(std::string_view s) {
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '\\') {
      out.push_back(s[i]);
    } else if (i + 1 < s.size() && s[i + 1] == '\\') {
      out.push_back('\\');
      ++i;
    } else if (i + 3 < s.size() && s[i + 1] == 'x' && nibble(s[i + 2]) >= 0 && nibble(s[i + 3]) >= 0) {
      out.push_back(static_cast<char>(nibble(s[i + 2]) * 16 + nibble(s[i + 3])));
      i += 3;
    } else {
      throw std::invalid_argument("bad escape in argument: " + std::string(s));
    }
  }
  return out;
}

string_index load_index(const std::string& path) { return string_index::load(read_file(path)); }

void print_summary(string_index& idx, std::size_t bytes) {
  const auto rep = idx.report();
  std::cout << "variant: " << variant_name(idx.variant()) << "\n"
            << "n: " << rep.n << "\n"
            << "distinct: " << rep.distinct << "\n"
            << "avg_height: " << rep.avg_height << "\n"
            << "bytes: " << bytes << "\n";
}

struct options {
  std::string index;
  std::string input;
  std::string variant = "static";
  bool length_prefixed = false;
  std::string op;
  std::size_t pos = 0, idx = 0, from = 0, threshold = 1, sample = 1000;
  std::optional<std::size_t> depth;
  std::optional<std::size_t> to_opt;
  std::string str, prefix;
  std::uint64_t seed = 1;
};

int cmd_build(const options& o) {
  const auto lines = read_input(o.input, o.length_prefixed);
  auto idx = string_index::build(lines, parse_variant(o.variant));
  const std::string blob = idx.save();
  write_file_atomic(o.index, blob);
  print_summary(idx, blob.size());
  return kOk;
}

int cmd_append(const options& o) {
  auto idx = load_index(o.index);
  if (idx.variant() == variant_kind::static_trie) throw variant_error("append: the index is static; rebuild it with --variant append or dynamic");
  const auto lines = read_input(o.input, o.length_prefixed);
  for (const auto& s : lines) idx.append(s);
  const std::string blob = idx.save();
  write_file_atomic(o.index, blob);
  print_summary(idx, blob.size());
  return kOk;
}

void print_entries(const std::vector<string_index::entry>& es) {
  for (const auto& e : es) {
    std::cout << e.count << '\t' << escape(e.value);
    if (!e.complete) std::cout << "\t(prefix)";
    std::cout << '\n';
  }
}

int cmd_query(const options& o) {
  const auto idx = load_index(o.index);
  const std::size_t to = o.to_opt.value_or(idx.size());
  const std::string s = unescape(o.str), p = unescape(o.prefix);
  if (o.op == "access") {
    std::cout << escape(idx.access(o.pos)) << '\n';
  } else if (o.op == "rank") {
    std::cout << idx.rank(s, o.pos) << '\n';
  } else if (o.op == "select") {
    std::cout << idx.select(s, o.idx) << '\n';
  } else if (o.op == "rank-prefix") {
    std::cout << idx.rank_prefix(p, o.pos) << '\n';
  } else if (o.op == "select-prefix") {
    std::cout << idx.select_prefix(p, o.idx) << '\n';
  } else if (o.op == "distinct") {
    print_entries(idx.distinct(o.from, to, o.depth));
  } else if (o.op == "majority") {
    if (o.from >= to) throw range_error("majority: empty range");
    const auto m = idx.majority(o.from, to);
    if (m) std::cout << escape(*m) << '\n';
    else std::cerr << "no majority\n";
  } else if (o.op == "threshold") {
    print_entries(idx.threshold(o.from, to, o.threshold));
  }
  return kOk;
}

int cmd_stats(const options& o) {
  const std::string blob = read_file(o.index);
  const auto idx = string_index::load(blob);
  const auto r = idx.report();
  const double lb = static_cast<double>(r.lt_bits) + std::ceil(r.nh0 - 1e-9);
  std::cout << "variant: " << variant_name(idx.variant()) << "\n"
            << "n: " << r.n << "\n"
            << "distinct: " << r.distinct << "\n"
            << "H0: " << r.h0 << "\n"
            << "nH0_bits: " << r.nh0 << "\n"
            << "label_bits: " << r.label_bits << "\n"
            << "edges: " << r.edges << "\n"
            << "LT_bits: " << r.lt_bits << "\n"
            << "LB_bits: " << lb << "\n"
            << "avg_height: " << r.avg_height << "\n"
            << "max_height: " << r.max_height << "\n"
            << "mean_length: " << r.mean_length << "\n"
            << "bitvector_length: " << r.bitvector_length << "\n"
            << "bitvector_bits: " << r.bitvector_bits << "\n"
            << "record_bits: " << r.record_bits << "\n"
            << "trie_bits: " << r.trie_bits << "\n"
            << "total_bits: " << r.total_bits << "\n"
            << "file_bytes: " << blob.size() << "\n";
  return kOk;
}

// Differential test of the loaded index against a scan oracle built from its
// own decoded contents.
int cmd_selfcheck(const options& o) {
  const auto idx = load_index(o.index);
  idx.check_structure();
  std::vector<std::string> values;
  values.reserve(idx.size());
  idx.for_each(0, idx.size(), [&](std::string s) { values.push_back(std::move(s)); });
  const vector_oracle<std::string> ref(values);
  const std::size_t n = values.size();
  std::mt19937_64 rng(o.seed);
  std::size_t checks = 0, failures = 0;
  auto check = [&](bool ok, const std::string& what) {
    ++checks;
    if (!ok && failures++ < 10) std::cerr << "mismatch: " << what << '\n';
  };
  // Random window, short enough for the scan oracle.
  auto window = [&] {
    const std::size_t l = rng() % (n + 1);
    return std::pair{l, std::min(n, l + rng() % 2048)};
  };
  const auto lower = [&](std::size_t l, std::size_t r) {
    std::vector<std::string> v(values.begin() + static_cast<std::ptrdiff_t>(l), values.begin() + static_cast<std::ptrdiff_t>(r));
    return vector_oracle<std::string>(std::move(v));
  };
  // Whole-sequence counts, one scan.
  if (n > 0) {
    for (const auto& [v, c] : ref.histogram(0, n)) check(idx.rank(v, n) == c, "rank " + escape(v));
  }
  for (std::size_t q = 0; q < o.sample && n > 0; ++q) {
    const std::size_t pos = rng() % n;
    check(idx.access(pos) == values[pos], "access " + std::to_string(pos));

    const auto [l, r] = window();
    const auto win = lower(l, r);
    const std::string& s = r > l ? values[l + rng() % (r - l)] : values[pos];
    const std::string pre = s.substr(0, rng() % (s.size() + 1));
    check(idx.rank(s, r) - idx.rank(s, l) == win.rank(s, r - l), "rank " + escape(s));
    check(idx.rank_prefix(pre, r) - idx.rank_prefix(pre, l) == win.rank_prefix(pre, r - l), "rank-prefix " + escape(pre));
    // Every occurrence inside the window must be found by select.
    const std::size_t before = idx.rank(s, l), before_p = idx.rank_prefix(pre, l);
    for (std::size_t k = 0; k < win.rank(s, r - l) && k < 8; ++k)
      check(idx.select(s, before + k) == l + win.select(s, k), "select " + escape(s));
    for (std::size_t k = 0; k < win.rank_prefix(pre, r - l) && k < 8; ++k)
      check(idx.select_prefix(pre, before_p + k) == l + win.select_prefix(pre, k), "select-prefix " + escape(pre));

    const auto hist = ref.histogram(l, r);
    const auto d = idx.distinct(l, r);
    bool same = d.size() == hist.size();
    std::size_t i = 0;
    for (auto it = hist.begin(); same && it != hist.end(); ++it, ++i)
      same = d[i].value == it->first && d[i].count == it->second && d[i].complete;
    check(same, "distinct [" + std::to_string(l) + "," + std::to_string(r) + ")");
    if (l < r) check(idx.majority(l, r) == ref.majority(l, r), "majority");
    const std::size_t t = 1 + rng() % 8;
    const auto th = idx.threshold(l, r, t);
    const auto th_ref = ref.threshold(l, r, t);
    same = th.size() == th_ref.size();
    for (std::size_t j = 0; same && j < th.size(); ++j) same = th[j].value == th_ref[j].first && th[j].count == th_ref[j].second;
    check(same, "threshold");
  }
  std::cout << "selfcheck: " << (failures == 0 ? "pass" : "FAIL") << " (n=" << n << ", checks=" << checks
            << ", failures=" << failures << ")\n";
  return failures == 0 ? kOk : kOther;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wavelet trie index tool"};
  app.require_subcommand(1);
  options o;

  auto* build = app.add_subcommand("build", "build an index from a string log");
  build->add_option("--input,-i", o.input, "input file, one string per line")->required();
  build->add_option("--index", o.index, "output index path")->required();
  build->add_option("--variant", o.variant, "static, append or dynamic")->check(CLI::IsMember({"static", "append", "dynamic"}));
  build->add_flag("--length-prefixed", o.length_prefixed, "input is u32 length + bytes records");

  auto* append = app.add_subcommand("append", "append strings to an append or dynamic index");
  append->add_option("--input,-i", o.input, "input file")->required();
  append->add_option("--index", o.index, "index path")->required();
  append->add_flag("--length-prefixed", o.length_prefixed, "input is u32 length + bytes records");

  auto* query = app.add_subcommand("query", "run one query");
  query->add_option("op", o.op, "query kind")
      ->required()
      ->check(CLI::IsMember({"access", "rank", "select", "rank-prefix", "select-prefix", "distinct", "majority", "threshold"}));
  query->add_option("--index", o.index, "index path")->required();
  query->add_option("--pos", o.pos, "position (access) or exclusive bound (rank)");
  query->add_option("--idx", o.idx, "occurrence number for select, from 0");
  query->add_option("--string", o.str, "string argument; \\xHH escapes allowed");
  query->add_option("--prefix", o.prefix, "prefix argument; \\xHH escapes allowed");
  query->add_option("--from", o.from, "range start");
  query->add_option("--to", o.to_opt, "range end (exclusive), default n");
  query->add_option("--threshold", o.threshold, "minimum count")->check(CLI::PositiveNumber);
  query->add_option("--depth", o.depth, "distinct: group by the first DEPTH bytes");

  auto* stats = app.add_subcommand("stats", "print space statistics");
  stats->add_option("--index", o.index, "index path")->required();

  auto* self = app.add_subcommand("selfcheck", "compare the index against a scan oracle");
  self->add_option("--index", o.index, "index path")->required();
  self->add_option("--sample", o.sample, "number of random query rounds");
  self->add_option("--seed", o.seed, "random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kOther;
  }

  try {
    if (*build) return cmd_build(o);
    if (*append) return cmd_append(o);
    if (*query) return cmd_query(o);
    if (*stats) return cmd_stats(o);
    if (*self) return cmd_selfcheck(o);
  } catch (const range_error& e) {
    std::cerr << "wt: " << e.what() << '\n';
    return kRange;
  } catch (const not_found_error& e) {
    std::cerr << "wt: " << e.what() << '\n';
    return kRange;
  } catch (const decode_error& e) {
    std::cerr << "wt: corrupt index: " << e.what() << '\n';
    return kCorrupt;
  } catch (const variant_error& e) {
    std::cerr << "wt: " << e.what() << '\n';
    return kVariant;
  } catch (const std::exception& e) {
    std::cerr << "wt: " << e.what() << '\n';
    return kOther;
  }
  return kOther;
}
