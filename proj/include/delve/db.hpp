#pragma once
// Database connectivity and the inductive statistics layer: CSV ingestion
// with type inference, schema introspection, bounded SQL execution, and the
// per-column summary computation embedded into executor answers.
//
// The embedded engine is SQLite. Incoming SQL written for the server dialect
// is normalized at the identifier-quoting level (backticks to double quotes);
// double-quoted identifiers work natively in both dialects.

#include <sqlite3.h>

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "delve/core.hpp"
#include "delve/util.hpp"

namespace delve {

enum class SqlDialect { sqlite, postgres };

inline std::string to_string(SqlDialect d) {
    return d == SqlDialect::sqlite ? "SQLite" : "PostgreSQL";
}

struct TableResult {
    std::vector<std::string> columns;
    std::vector<std::vector<std::optional<std::string>>> rows;
    long long total_row_count = 0;  // pre-truncation
    bool truncated = false;

    bool operator==(const TableResult&) const = default;
};

struct ColumnInfo {
    std::string name;
    std::string declared_type;
    std::vector<std::string> samples;  // up to 3, drawn from actual rows
};

struct TableDescriptor {
    std::string name;
    std::string description;
    std::vector<ColumnInfo> columns;
};

// Replaces backtick identifier quoting with the double-quote form shared by
// both dialects; string literals are left untouched.
inline std::string normalize_identifier_quoting(const std::string& sql) {
    std::string out;
    out.reserve(sql.size());
    bool in_single = false;
    for (size_t i = 0; i < sql.size(); ++i) {
        char c = sql[i];
        if (in_single) {
            out += c;
            if (c == '\'') {
                if (i + 1 < sql.size() && sql[i + 1] == '\'') out += sql[++i];
                else in_single = false;
            }
            continue;
        }
        if (c == '\'') { in_single = true; out += c; continue; }
        out += (c == '`') ? '"' : c;
    }
    return out;
}

// ---------------------------------------------------------------------------
// CSV parsing (RFC-4180 style: quoted fields, "" escapes, embedded newlines)

struct CsvData {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<size_t> row_lines;  // physical line each row starts on
};

inline CsvData parse_csv(const std::string& content) {
    if (trim(content).empty()) throw Error("CSV file is empty");
    CsvData out;
    std::vector<std::string> current;
    std::string field;
    bool in_quotes = false;
    size_t line = 1, row_start_line = 1;
    bool row_has_content = false;

    auto end_field = [&]() {
        current.push_back(field);
        field.clear();
    };
    auto end_row = [&]() {
        end_field();
        if (out.header.empty()) {
            out.header = current;
        } else {
            out.rows.push_back(current);
            out.row_lines.push_back(row_start_line);
        }
        current.clear();
        row_has_content = false;
    };

    for (size_t i = 0; i < content.size(); ++i) {
        char c = content[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < content.size() && content[i + 1] == '"') { field += '"'; ++i; }
                else in_quotes = false;
            } else {
                field += c;
                if (c == '\n') ++line;
            }
            continue;
        }
        switch (c) {
            case '"': in_quotes = true; row_has_content = true; break;
            case ',': end_field(); row_has_content = true; break;
            case '\r': break;
            case '\n':
                if (row_has_content || !field.empty() || !current.empty()) end_row();
                ++line;
                row_start_line = line;
                break;
            default: field += c; row_has_content = true; break;
        }
    }
    if (in_quotes) throw Error("CSV has an unterminated quoted field");
    if (row_has_content || !field.empty() || !current.empty()) end_row();

    if (out.header.empty()) throw Error("CSV file is empty");
    for (size_t r = 0; r < out.rows.size(); ++r) {
        if (out.rows[r].size() != out.header.size())
            throw Error("CSV row at line " + std::to_string(out.row_lines[r]) + " has " +
                        std::to_string(out.rows[r].size()) + " fields, expected " +
                        std::to_string(out.header.size()));
    }
    return out;
}

// ---------------------------------------------------------------------------

class Database {
public:
    Database() = default;

    static Database open_memory() { return Database(":memory:"); }

    static Database open(const std::string& dsn) { return Database(dsn); }

    Database(Database&& other) noexcept : db_(other.db_), dsn_(std::move(other.dsn_)),
                                          annotations_(std::move(other.annotations_)) {
        other.db_ = nullptr;
    }
    Database& operator=(Database&& other) noexcept {
        if (this != &other) {
            close();
            db_ = other.db_;
            dsn_ = std::move(other.dsn_);
            annotations_ = std::move(other.annotations_);
            other.db_ = nullptr;
        }
        return *this;
    }
    Database(const Database&) = delete;
    Database& operator=(const Database&) = delete;
    ~Database() { close(); }

    bool connected() const { return db_ != nullptr; }
    const std::string& dsn() const { return dsn_; }

    void set_table_description(const std::string& table, const std::string& description) {
        annotations_[table] = description;
    }

    // Loads a CSV with a header row into a new table. Column type is numeric
    // iff every non-empty cell parses as a number; empty cells become NULL.
    long long ingest_csv(const std::filesystem::path& path, const std::string& table_name) {
        require_connection();
        if (table_exists(table_name)) throw Error("table already exists: " + table_name);
        CsvData csv = parse_csv(read_file(path));
        size_t ncols = csv.header.size();

        std::vector<std::string> types(ncols, "TEXT");
        for (size_t c = 0; c < ncols; ++c) {
            bool any = false, all_numeric = true, all_integer = true;
            for (const auto& row : csv.rows) {
                const std::string& cell = row[c];
                if (cell.empty()) continue;
                any = true;
                double v;
                if (!parse_number(cell, v)) { all_numeric = false; break; }
                if (v != std::floor(v) || cell.find_first_of(".eE") != std::string::npos)
                    all_integer = false;
            }
            if (any && all_numeric) types[c] = all_integer ? "INTEGER" : "REAL";
        }

        std::string create = "CREATE TABLE " + quote_ident(table_name) + " (";
        for (size_t c = 0; c < ncols; ++c) {
            if (c) create += ", ";
            create += quote_ident(csv.header[c]) + " " + types[c];
        }
        create += ")";
        exec_or_throw(create);

        std::string insert = "INSERT INTO " + quote_ident(table_name) + " VALUES (";
        for (size_t c = 0; c < ncols; ++c) insert += c ? ",?" : "?";
        insert += ")";
        sqlite3_stmt* stmt = nullptr;
        if (sqlite3_prepare_v2(db_, insert.c_str(), -1, &stmt, nullptr) != SQLITE_OK)
            throw Error(std::string("prepare failed: ") + sqlite3_errmsg(db_));
        exec_or_throw("BEGIN");
        for (const auto& row : csv.rows) {
            for (size_t c = 0; c < ncols; ++c) {
                const std::string& cell = row[c];
                int idx = static_cast<int>(c) + 1;
                if (cell.empty()) {
                    sqlite3_bind_null(stmt, idx);
                } else if (types[c] == "INTEGER") {
                    sqlite3_bind_int64(stmt, idx, static_cast<long long>(std::stod(cell)));
                } else if (types[c] == "REAL") {
                    sqlite3_bind_double(stmt, idx, std::stod(cell));
                } else {
                    sqlite3_bind_text(stmt, idx, cell.c_str(), -1, SQLITE_TRANSIENT);
                }
            }
            if (sqlite3_step(stmt) != SQLITE_DONE) {
                std::string msg = sqlite3_errmsg(db_);
                sqlite3_finalize(stmt);
                exec_quiet("ROLLBACK");
                throw Error("insert failed: " + msg);
            }
            sqlite3_reset(stmt);
        }
        sqlite3_finalize(stmt);
        exec_or_throw("COMMIT");
        return static_cast<long long>(csv.rows.size());
    }

    // One (name, description) pair per table; description falls back to an
    // auto-generated row/column summary.
    std::vector<std::pair<std::string, std::string>> get_tables() {
        require_connection();
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto& name : table_names()) {
            auto ann = annotations_.find(name);
            if (ann != annotations_.end()) {
                out.emplace_back(name, ann->second);
                continue;
            }
            long long rows = scalar_count("SELECT COUNT(*) FROM " + quote_ident(name));
            std::vector<std::string> cols;
            for (const auto& ci : column_infos(name, 0)) cols.push_back(ci.name);
            out.emplace_back(name, std::to_string(rows) + " rows, columns: " + join(cols, ", "));
        }
        return out;
    }

    std::vector<TableDescriptor> table_details(const std::vector<std::string>& names) {
        require_connection();
        std::vector<TableDescriptor> out;
        for (const auto& name : names) {
            if (!table_exists(name)) throw Error("unknown table: " + name);
            TableDescriptor td;
            td.name = name;
            auto ann = annotations_.find(name);
            long long rows = scalar_count("SELECT COUNT(*) FROM " + quote_ident(name));
            td.description = ann != annotations_.end()
                                 ? ann->second
                                 : std::to_string(rows) + " rows";
            td.columns = column_infos(name, 3);
            out.push_back(std::move(td));
        }
        return out;
    }

    // Executes one read-only statement. Returns at most row_limit rows while
    // total_row_count reflects the untruncated size; long cells are elided.
    TableResult execute_sql(const std::string& sql, int row_limit, int cell_char_limit = 200) {
        require_connection();
        std::string normalized = normalize_identifier_quoting(sql);
        sqlite3_stmt* stmt = nullptr;
        const char* tail = nullptr;
        if (sqlite3_prepare_v2(db_, normalized.c_str(), -1, &stmt, &tail) != SQLITE_OK) {
            std::string msg = sqlite3_errmsg(db_);
            sqlite3_finalize(stmt);
            throw Error("SQL error: " + msg);
        }
        if (!stmt) throw Error("SQL error: empty statement");
        std::string rest = tail ? trim(tail) : "";
        while (!rest.empty() && rest.front() == ';') rest = trim(rest.substr(1));
        if (!rest.empty()) {
            sqlite3_finalize(stmt);
            throw Error("only one SQL statement is allowed per call");
        }
        if (!sqlite3_stmt_readonly(stmt)) {
            sqlite3_finalize(stmt);
            throw Error("only read-only statements are allowed");
        }

        TableResult result;
        int ncols = sqlite3_column_count(stmt);
        for (int c = 0; c < ncols; ++c) {
            const char* cname = sqlite3_column_name(stmt, c);
            result.columns.push_back(cname ? cname : "");
        }
        int rc;
        while ((rc = sqlite3_step(stmt)) == SQLITE_ROW) {
            ++result.total_row_count;
            if (result.total_row_count > row_limit) continue;  // keep counting
            std::vector<std::optional<std::string>> row;
            row.reserve(ncols);
            for (int c = 0; c < ncols; ++c) {
                if (sqlite3_column_type(stmt, c) == SQLITE_NULL) {
                    row.emplace_back(std::nullopt);
                } else {
                    const unsigned char* text = sqlite3_column_text(stmt, c);
                    std::string cell = text ? reinterpret_cast<const char*>(text) : "";
                    row.emplace_back(elide(cell, static_cast<size_t>(cell_char_limit)));
                }
            }
            result.rows.push_back(std::move(row));
        }
        if (rc != SQLITE_DONE) {
            std::string msg = sqlite3_errmsg(db_);
            sqlite3_finalize(stmt);
            throw Error("SQL error: " + msg);
        }
        sqlite3_finalize(stmt);
        result.truncated = result.total_row_count > static_cast<long long>(result.rows.size());
        return result;
    }

    // COUNT-based distinct refinement over the untruncated result; returns
    // (total rows, non-null rows, distinct non-null values).
    std::optional<std::array<long long, 3>> distinct_counts(const std::string& sql,
                                                            const std::string& column) {
        std::string inner = trim(normalize_identifier_quoting(sql));
        while (!inner.empty() && inner.back() == ';') inner.pop_back();
        std::string q = "SELECT COUNT(*), COUNT(" + quote_ident(column) + "), COUNT(DISTINCT " +
                        quote_ident(column) + ") FROM (" + inner + ")";
        sqlite3_stmt* stmt = nullptr;
        if (sqlite3_prepare_v2(db_, q.c_str(), -1, &stmt, nullptr) != SQLITE_OK) {
            sqlite3_finalize(stmt);
            return std::nullopt;
        }
        std::optional<std::array<long long, 3>> out;
        if (sqlite3_step(stmt) == SQLITE_ROW) {
            out = std::array<long long, 3>{sqlite3_column_int64(stmt, 0),
                                           sqlite3_column_int64(stmt, 1),
                                           sqlite3_column_int64(stmt, 2)};
        }
        sqlite3_finalize(stmt);
        return out;
    }

    static std::string quote_ident(const std::string& name) {
        std::string out = "\"";
        for (char c : name) {
            if (c == '"') out += '"';
            out += c;
        }
        out += '"';
        return out;
    }

private:
    explicit Database(const std::string& dsn) : dsn_(dsn) {
        int flags = SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE | SQLITE_OPEN_URI;
        if (sqlite3_open_v2(dsn.c_str(), &db_, flags, nullptr) != SQLITE_OK) {
            std::string msg = db_ ? sqlite3_errmsg(db_) : "out of memory";
            close();
            throw Error("cannot open database '" + dsn + "': " + msg);
        }
    }

    void close() {
        if (db_) {
            sqlite3_close(db_);
            db_ = nullptr;
        }
    }

    void require_connection() const {
        if (!db_) throw Error("database connection is closed");
    }

    void exec_or_throw(const std::string& sql) {
        char* err = nullptr;
        if (sqlite3_exec(db_, sql.c_str(), nullptr, nullptr, &err) != SQLITE_OK) {
            std::string msg = err ? err : "unknown error";
            sqlite3_free(err);
            throw Error("SQL error: " + msg);
        }
    }

    void exec_quiet(const std::string& sql) {
        char* err = nullptr;
        sqlite3_exec(db_, sql.c_str(), nullptr, nullptr, &err);
        sqlite3_free(err);
    }

    bool table_exists(const std::string& name) {
        sqlite3_stmt* stmt = nullptr;
        sqlite3_prepare_v2(db_, "SELECT 1 FROM sqlite_master WHERE type='table' AND name=?", -1,
                           &stmt, nullptr);
        sqlite3_bind_text(stmt, 1, name.c_str(), -1, SQLITE_TRANSIENT);
        bool exists = sqlite3_step(stmt) == SQLITE_ROW;
        sqlite3_finalize(stmt);
        return exists;
    }

    std::vector<std::string> table_names() {
        std::vector<std::string> out;
        sqlite3_stmt* stmt = nullptr;
        sqlite3_prepare_v2(
            db_,
            "SELECT name FROM sqlite_master WHERE type='table' AND name NOT LIKE 'sqlite_%' ORDER BY name",
            -1, &stmt, nullptr);
        while (sqlite3_step(stmt) == SQLITE_ROW)
            out.emplace_back(reinterpret_cast<const char*>(sqlite3_column_text(stmt, 0)));
        sqlite3_finalize(stmt);
        return out;
    }

    long long scalar_count(const std::string& sql) {
        sqlite3_stmt* stmt = nullptr;
        if (sqlite3_prepare_v2(db_, sql.c_str(), -1, &stmt, nullptr) != SQLITE_OK) {
            sqlite3_finalize(stmt);
            return 0;
        }
        long long v = 0;
        if (sqlite3_step(stmt) == SQLITE_ROW) v = sqlite3_column_int64(stmt, 0);
        sqlite3_finalize(stmt);
        return v;
    }

    std::vector<ColumnInfo> column_infos(const std::string& table, int sample_count) {
        std::vector<ColumnInfo> out;
        sqlite3_stmt* stmt = nullptr;
        std::string q = "PRAGMA table_info(" + quote_ident(table) + ")";
        sqlite3_prepare_v2(db_, q.c_str(), -1, &stmt, nullptr);
        while (sqlite3_step(stmt) == SQLITE_ROW) {
            ColumnInfo ci;
            ci.name = reinterpret_cast<const char*>(sqlite3_column_text(stmt, 1));
            const unsigned char* t = sqlite3_column_text(stmt, 2);
            ci.declared_type = t ? reinterpret_cast<const char*>(t) : "";
            out.push_back(std::move(ci));
        }
        sqlite3_finalize(stmt);
        if (sample_count > 0) {
            for (auto& ci : out) {
                std::string sq = "SELECT " + quote_ident(ci.name) + " FROM " + quote_ident(table) +
                                 " WHERE " + quote_ident(ci.name) + " IS NOT NULL LIMIT " +
                                 std::to_string(sample_count);
                sqlite3_stmt* ss = nullptr;
                if (sqlite3_prepare_v2(db_, sq.c_str(), -1, &ss, nullptr) == SQLITE_OK) {
                    while (sqlite3_step(ss) == SQLITE_ROW) {
                        const unsigned char* v = sqlite3_column_text(ss, 0);
                        ci.samples.push_back(v ? reinterpret_cast<const char*>(v) : "");
                    }
                }
                sqlite3_finalize(ss);
            }
        }
        return out;
    }

    sqlite3* db_ = nullptr;
    std::string dsn_;
    std::map<std::string, std::string> annotations_;
};

// Independent sessions over the same store; callers get one connection per
// executor run.
class SessionPool {
public:
    explicit SessionPool(std::string dsn) : dsn_(std::move(dsn)) {}
    Database acquire() const { return Database::open(dsn_); }
    const std::string& dsn() const { return dsn_; }

private:
    std::string dsn_;
};

// ---------------------------------------------------------------------------
// Summary statistics

// Per-column statistics over the returned rows. Nulls are excluded from
// numeric stats and counted as the distinct value "NULL" for frequency.
// Top-5 ties break by ascending value order; the median of an even-count
// column is the mean of the two middle values.
inline std::vector<ColumnSummary> column_summaries(const TableResult& result) {
    std::vector<ColumnSummary> out;
    size_t nrows = result.rows.size();
    for (size_t c = 0; c < result.columns.size(); ++c) {
        ColumnSummary cs;
        cs.column = result.columns[c];
        std::map<std::string, long long> counts;
        std::vector<double> numerics;
        bool numeric_ok = true;
        size_t non_null = 0;
        for (size_t r = 0; r < nrows; ++r) {
            const auto& cell = result.rows[r][c];
            counts[cell ? *cell : std::string("NULL")]++;
            if (cell) {
                ++non_null;
                double v;
                if (numeric_ok && parse_number(*cell, v)) numerics.push_back(v);
                else numeric_ok = false;
            }
        }
        cs.distinct_pct = nrows == 0 ? 0.0
                                     : static_cast<double>(counts.size()) / static_cast<double>(nrows);
        std::vector<std::pair<std::string, long long>> freq(counts.begin(), counts.end());
        std::sort(freq.begin(), freq.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return a.first < b.first;
        });
        if (freq.size() > 5) freq.resize(5);
        cs.top_values = std::move(freq);
        if (numeric_ok && non_null > 0) {
            std::vector<double> sorted = numerics;
            std::sort(sorted.begin(), sorted.end());
            NumericStats ns;
            ns.min = sorted.front();
            ns.max = sorted.back();
            size_t n = sorted.size();
            ns.median = (n % 2 == 1) ? sorted[n / 2] : (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0;
            double sum = 0;
            for (double v : numerics) sum += v;
            ns.mean = sum / static_cast<double>(n);
            cs.numeric = ns;
        }
        out.push_back(std::move(cs));
    }
    return out;
}

// Same as column_summaries, but when the result was row-truncated the
// distinct percentage is recomputed over the full result via a secondary
// COUNT(DISTINCT ...) query, so truncation does not bias surfacing.
inline std::vector<ColumnSummary> column_summaries_full(Database& db, const std::string& sql,
                                                        const TableResult& result) {
    auto out = column_summaries(result);
    if (!result.truncated) return out;
    for (auto& cs : out) {
        auto counts = db.distinct_counts(sql, cs.column);
        if (!counts) continue;  // expression columns may not be re-referencable
        auto [total, non_null, distinct] = *counts;
        long long unique = distinct + ((total - non_null) > 0 ? 1 : 0);
        cs.distinct_pct = total == 0 ? 0.0 : static_cast<double>(unique) / static_cast<double>(total);
    }
    return out;
}

// Frozen text contract: this block is consumed by prompts, so any format
// change shifts model behavior.
inline std::string render_stats_block(const std::vector<ColumnSummary>& summaries) {
    std::string out = "Column statistics:\n";
    for (const auto& cs : summaries) {
        out += "- " + cs.column + ": distinct_pct=" + format_number(cs.distinct_pct) + ", top5=[";
        for (size_t i = 0; i < cs.top_values.size(); ++i) {
            if (i) out += ", ";
            out += "('" + cs.top_values[i].first + "', " + std::to_string(cs.top_values[i].second) + ")";
        }
        out += "]";
        if (cs.numeric) {
            out += ", min=" + format_number(cs.numeric->min) + ", max=" + format_number(cs.numeric->max) +
                   ", median=" + format_number(cs.numeric->median) +
                   ", mean=" + format_number(cs.numeric->mean);
        }
        out += "\n";
    }
    return out;
}

inline std::string render_answer(const TableResult& result,
                                 const std::vector<ColumnSummary>& summaries) {
    std::string out;
    if (result.truncated) {
        out += "Result preview (showing " + std::to_string(result.rows.size()) + " of " +
               std::to_string(result.total_row_count) + " rows):\n";
    } else {
        out += "Result preview (" + std::to_string(result.total_row_count) + " rows):\n";
    }
    out += join(result.columns, " | ") + "\n";
    for (const auto& row : result.rows) {
        std::vector<std::string> cells;
        cells.reserve(row.size());
        for (const auto& cell : row) cells.push_back(cell ? *cell : "NULL");
        out += join(cells, " | ") + "\n";
    }
    out += render_stats_block(summaries);
    return out;
}

// Observation text for the table-listing and table-detail executor actions.
inline std::string render_tables_text(const std::vector<std::pair<std::string, std::string>>& tables) {
    if (tables.empty()) return "No tables found.";
    std::string out = "Tables:\n";
    for (const auto& [name, desc] : tables) out += "- " + name + ": " + desc + "\n";
    return out;
}

inline std::string render_table_details_text(const std::vector<TableDescriptor>& details) {
    std::string out;
    for (const auto& td : details) {
        out += "Table " + td.name + " (" + td.description + "):\n";
        for (const auto& ci : td.columns) {
            out += "  " + ci.name + " " + (ci.declared_type.empty() ? "TEXT" : ci.declared_type) +
                   ", samples: ";
            if (ci.samples.empty()) {
                out += "(none)";
            } else {
                std::vector<std::string> quoted;
                for (const auto& s : ci.samples) quoted.push_back("'" + elide(s, 40) + "'");
                out += join(quoted, ", ");
            }
            out += "\n";
        }
    }
    return out.empty() ? "No details available." : out;
}

}  // namespace delve
