#include "fraudbench/graph.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "fraudbench/error.hpp"

namespace fraudbench {

std::int64_t MultiGraph::total_edge_weight() const {
  std::int64_t total = 0;
  for (const auto& edges : relations)
    for (const auto& e : edges) total += e.weight;
  return total;
}

namespace {

void check_window(WindowSpec window) {
  if (window.first_month < 1 || window.first_month > window.last_month)
    throw RangeError("invalid window [" + std::to_string(window.first_month) + ", " +
                     std::to_string(window.last_month) + "]");
}

int relation_count_of(const TransactionLog& log) {
  std::int32_t max_relation = 0;
  for (const auto& tx : log) max_relation = std::max(max_relation, tx.relation);
  return static_cast<int>(max_relation) + 1;
}

}  // namespace

MultiGraph build_graph(const TransactionLog& log, const AccountTable& accounts,
                       WindowSpec window) {
  check_window(window);
  const std::int64_t n = accounts.size();
  for (const auto& tx : log) {
    if (tx.src < 0 || tx.src >= n || tx.dst < 0 || tx.dst >= n)
      throw DanglingAccountError("transaction " + std::to_string(tx.tx_id) +
                                 " references an unknown account id");
  }

  MultiGraph graph;
  graph.node_count = n;
  graph.relations.resize(relation_count_of(log));

  std::vector<std::vector<std::pair<std::int32_t, std::int32_t>>> pairs(
      graph.relations.size());
  for (const auto& tx : log) {
    if (window.contains(tx.month)) pairs[tx.relation].emplace_back(tx.src, tx.dst);
  }
  for (std::size_t r = 0; r < pairs.size(); ++r) {
    auto& p = pairs[r];
    std::sort(p.begin(), p.end());
    for (std::size_t i = 0; i < p.size();) {
      std::size_t j = i;
      while (j < p.size() && p[j] == p[i]) ++j;
      graph.relations[r].push_back(
          {p[i].first, p[i].second, static_cast<std::int64_t>(j - i)});
      i = j;
    }
  }
  return graph;
}

NodeTable extract_features(const TransactionLog& log, const AccountTable& accounts,
                           WindowSpec window) {
  check_window(window);
  const std::int64_t n = accounts.size();
  for (const auto& tx : log) {
    if (tx.src < 0 || tx.src >= n || tx.dst < 0 || tx.dst >= n)
      throw DanglingAccountError("transaction " + std::to_string(tx.tx_id) +
                                 " references an unknown account id");
  }

  struct Side {
    std::int64_t count = 0;
    double sum = 0.0, sumsq = 0.0;
    double max = 0.0, min = 0.0;

    void add(double amount) {
      if (count == 0) {
        max = min = amount;
      } else {
        max = std::max(max, amount);
        min = std::min(min, amount);
      }
      ++count;
      sum += amount;
      sumsq += amount * amount;
    }
    double mean() const { return count ? sum / static_cast<double>(count) : 0.0; }
    double stddev() const {
      if (!count) return 0.0;
      const double m = mean();
      return std::sqrt(std::max(0.0, sumsq / static_cast<double>(count) - m * m));
    }
  };

  std::vector<Side> in(n), out(n);
  std::vector<std::vector<std::int32_t>> counterparties(n);
  std::vector<std::vector<std::int32_t>> months(n);
  for (const auto& tx : log) {
    if (!window.contains(tx.month)) continue;
    out[tx.src].add(tx.amount);
    in[tx.dst].add(tx.amount);
    counterparties[tx.src].push_back(tx.dst);
    counterparties[tx.dst].push_back(tx.src);
    months[tx.src].push_back(tx.month);
    months[tx.dst].push_back(tx.month);
  }

  auto distinct = [](std::vector<std::int32_t>& values) {
    std::sort(values.begin(), values.end());
    return static_cast<double>(
        std::unique(values.begin(), values.end()) - values.begin());
  };

  NodeTable table;
  table.features.resize(n, kFeatureCount);
  table.labels = accounts.labels;
  table.active.resize(n);
  for (std::int64_t i = 0; i < n; ++i) {
    auto row = table.features.row(i);
    row[0] = static_cast<double>(in[i].count);
    row[1] = static_cast<double>(out[i].count);
    row[2] = in[i].sum;
    row[3] = out[i].sum;
    row[4] = in[i].mean();
    row[5] = out[i].mean();
    row[6] = in[i].stddev();
    row[7] = out[i].stddev();
    row[8] = in[i].count ? in[i].max : 0.0;
    row[9] = out[i].count ? out[i].max : 0.0;
    row[10] = in[i].count ? in[i].min : 0.0;
    row[11] = out[i].count ? out[i].min : 0.0;
    row[12] = distinct(counterparties[i]);
    row[13] = distinct(months[i]);
    table.active[i] = (in[i].count + out[i].count) > 0 ? 1 : 0;
  }
  return table;
}

double imbalance_ratio(const std::vector<std::int8_t>& labels) {
  std::int64_t legit = 0, fraud = 0;
  for (auto label : labels) {
    if (label == 0)
      ++legit;
    else if (label == 1)
      ++fraud;
    else
      throw ValueError("labels must be 0 or 1");
  }
  if (fraud == 0) throw UndefinedRatioError("no fraud labels: ratio undefined");
  return static_cast<double>(legit) / static_cast<double>(fraud);
}

namespace {

class CsvWriter {
 public:
  explicit CsvWriter(const std::filesystem::path& file) : path_(file.string()) {
    out_ = std::fopen(path_.c_str(), "wb");
    if (!out_) throw IoError("cannot open for writing: " + path_);
  }
  ~CsvWriter() {
    if (out_) std::fclose(out_);
  }
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void line(const std::string& text) {
    if (std::fputs(text.c_str(), out_) == EOF || std::fputc('\n', out_) == EOF)
      throw IoError("write failed: " + path_);
  }

 private:
  std::string path_;
  std::FILE* out_ = nullptr;
};

std::string format_amount(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", value);
  return buf;
}

std::string format_feature(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", value);
  return buf;
}

struct CsvReader {
  std::ifstream in;
  std::string file;
  int line_no = 0;

  explicit CsvReader(const std::filesystem::path& path)
      : in(path, std::ios::binary), file(path.filename().string()) {
    if (!in) throw IoError("cannot open: " + path.string());
  }

  bool next(std::string& line) {
    if (!std::getline(in, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ++line_no;
    return true;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw SchemaError(file + ":" + std::to_string(line_no) + ": " + msg);
  }
};

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

std::int64_t parse_int(const CsvReader& reader, const std::string& field,
                       const char* name) {
  std::int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw SchemaError(reader.file + ":" + std::to_string(reader.line_no) + ": bad " +
                      name + " '" + field + "'");
  }
  return value;
}

double parse_double(const CsvReader& reader, const std::string& field, const char* name) {
  try {
    std::size_t used = 0;
    const double value = std::stod(field, &used);
    if (used != field.size()) throw std::invalid_argument(field);
    return value;
  } catch (const std::exception&) {
    throw SchemaError(reader.file + ":" + std::to_string(reader.line_no) + ": bad " +
                      name + " '" + field + "'");
  }
}

bool is_two_decimal(const std::string& field) {
  const std::size_t dot = field.find('.');
  if (dot == std::string::npos || field.size() - dot - 1 != 2) return false;
  if (dot == 0) return false;
  for (std::size_t i = 0; i < field.size(); ++i) {
    if (i == dot) continue;
    if (!std::isdigit(static_cast<unsigned char>(field[i]))) return false;
  }
  return true;
}

}  // namespace

void export_dataset(const std::filesystem::path& dir, const TransactionLog& log,
                    const AccountTable& accounts, const NodeTable* features) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory: " + dir.string());

  {
    CsvWriter out(dir / "accounts.csv");
    out.line("account_id,label");
    for (std::int64_t i = 0; i < accounts.size(); ++i)
      out.line(std::to_string(i) + "," + std::to_string(accounts.labels[i]));
  }
  {
    CsvWriter out(dir / "transactions.csv");
    out.line("tx_id,src,dst,amount,month,relation,illicit");
    for (const auto& tx : log) {
      out.line(std::to_string(tx.tx_id) + "," + std::to_string(tx.src) + "," +
               std::to_string(tx.dst) + "," + format_amount(tx.amount) + "," +
               std::to_string(tx.month) + "," + std::to_string(tx.relation) + "," +
               (tx.illicit ? "1" : "0"));
    }
  }
  if (features) {
    CsvWriter out(dir / "features.csv");
    std::string header = "node_id";
    for (int f = 0; f < kFeatureCount; ++f) header += ",f" + std::to_string(f);
    out.line(header);
    for (std::int64_t i = 0; i < features->features.rows(); ++i) {
      std::string row = std::to_string(i);
      for (int f = 0; f < kFeatureCount; ++f)
        row += "," + format_feature(features->features(i, f));
      out.line(row);
    }
  }
}

Dataset load_dataset(const std::filesystem::path& dir) {
  Dataset dataset;

  {
    CsvReader reader(dir / "accounts.csv");
    std::string line;
    if (!reader.next(line) || line != "account_id,label")
      reader.fail("expected header 'account_id,label'");
    std::int64_t expected_id = 0;
    while (reader.next(line)) {
      const auto fields = split_fields(line);
      if (fields.size() != 2) reader.fail("expected 2 columns");
      const std::int64_t id = parse_int(reader, fields[0], "account_id");
      if (id != expected_id) reader.fail("non-contiguous account ids");
      const std::int64_t label = parse_int(reader, fields[1], "label");
      if (label != 0 && label != 1) reader.fail("label must be 0 or 1");
      dataset.accounts.labels.push_back(static_cast<std::int8_t>(label));
      ++expected_id;
    }
  }

  const std::int64_t n = dataset.accounts.size();
  {
    CsvReader reader(dir / "transactions.csv");
    std::string line;
    if (!reader.next(line) || line != "tx_id,src,dst,amount,month,relation,illicit")
      reader.fail("expected header 'tx_id,src,dst,amount,month,relation,illicit'");
    std::int64_t expected_id = 0;
    while (reader.next(line)) {
      const auto fields = split_fields(line);
      if (fields.size() != 7) reader.fail("expected 7 columns");
      Transaction tx;
      tx.tx_id = parse_int(reader, fields[0], "tx_id");
      if (tx.tx_id != expected_id) reader.fail("tx_id must increase from 0 without gaps");
      tx.src = static_cast<std::int32_t>(parse_int(reader, fields[1], "src"));
      tx.dst = static_cast<std::int32_t>(parse_int(reader, fields[2], "dst"));
      if (tx.src < 0 || tx.src >= n) reader.fail("src references an unknown account");
      if (tx.dst < 0 || tx.dst >= n) reader.fail("dst references an unknown account");
      if (tx.src == tx.dst) reader.fail("src == dst");
      if (!is_two_decimal(fields[3])) reader.fail("amount must have exactly 2 decimals");
      tx.amount = parse_double(reader, fields[3], "amount");
      if (!(tx.amount > 0.0)) reader.fail("amount must be > 0");
      tx.month = static_cast<std::int32_t>(parse_int(reader, fields[4], "month"));
      if (tx.month < 1) reader.fail("month must be >= 1");
      tx.relation = static_cast<std::int32_t>(parse_int(reader, fields[5], "relation"));
      if (tx.relation < 0) reader.fail("relation must be >= 0");
      const std::int64_t illicit = parse_int(reader, fields[6], "illicit");
      if (illicit != 0 && illicit != 1) reader.fail("illicit must be 0 or 1");
      tx.illicit = illicit == 1;
      dataset.months = std::max(dataset.months, static_cast<int>(tx.month));
      dataset.log.push_back(tx);
      ++expected_id;
    }
  }

  const auto features_path = dir / "features.csv";
  if (std::filesystem::exists(features_path)) {
    CsvReader reader(features_path);
    std::string line;
    std::string header = "node_id";
    for (int f = 0; f < kFeatureCount; ++f) header += ",f" + std::to_string(f);
    if (!reader.next(line) || line != header)
      reader.fail("expected header '" + header + "'");
    NodeTable table;
    table.features.resize(n, kFeatureCount);
    table.labels = dataset.accounts.labels;
    table.active.assign(n, 0);
    std::int64_t expected_id = 0;
    while (reader.next(line)) {
      const auto fields = split_fields(line);
      if (fields.size() != 1 + kFeatureCount)
        reader.fail("expected " + std::to_string(1 + kFeatureCount) + " columns");
      const std::int64_t id = parse_int(reader, fields[0], "node_id");
      if (id != expected_id) reader.fail("non-contiguous node ids");
      if (id >= n) reader.fail("node_id outside the account table");
      for (int f = 0; f < kFeatureCount; ++f) {
        const double value = parse_double(reader, fields[1 + f], "feature");
        if (!std::isfinite(value)) reader.fail("feature values must be finite");
        table.features(id, f) = value;
      }
      table.active[id] = (table.features(id, 0) + table.features(id, 1)) > 0 ? 1 : 0;
      ++expected_id;
    }
    if (expected_id != n) reader.fail("feature rows must cover every account");
    dataset.features = std::move(table);
  }

  return dataset;
}

}  // namespace fraudbench
