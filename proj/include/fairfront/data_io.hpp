#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "fairfront/distributions.hpp"
#include "fairfront/errors.hpp"
#include "fairfront/format.hpp"
#include "fairfront/rng.hpp"

namespace fairfront {

// how a sample maps onto csv columns; the sensitive column is either a
// binary column name or a numeric derivation rule "column>threshold"
struct SchemaDescriptor {
    std::string target_column;
    std::string sensitive_column;
    double sensitive_threshold = 0.0;
    bool sensitive_is_threshold = false;
    std::vector<std::string> feature_columns;
    std::vector<std::string> categorical_columns;
};

struct SplitSpec {
    double train_fraction = 2.0 / 3.0;
    std::uint64_t seed = 0;
};

enum class NoiseChannel { Y, Ybar };

namespace detail {

inline void set_sensitive_rule(SchemaDescriptor& schema, std::string_view value) {
    auto gt = value.find('>');
    if (gt == std::string_view::npos) {
        schema.sensitive_column = std::string(trim(value));
        schema.sensitive_is_threshold = false;
        return;
    }
    schema.sensitive_column = std::string(trim(value.substr(0, gt)));
    schema.sensitive_threshold =
        parse_double(trim(value.substr(gt + 1)), "sensitive threshold");
    schema.sensitive_is_threshold = true;
}

inline std::vector<std::string> name_list(std::string_view value) {
    std::vector<std::string> names;
    for (std::string_view part : split(value, ',')) {
        std::string_view t = trim(part);
        if (!t.empty())
            names.emplace_back(t);
    }
    return names;
}

} // namespace detail

// flat key-value schema text: target, sensitive, features, categoricals;
// '#' starts a comment
inline SchemaDescriptor parse_schema(std::string_view text) {
    SchemaDescriptor schema;
    bool have_target = false, have_sensitive = false;
    std::size_t lineno = 0;
    for (std::string_view raw : split(text, '\n')) {
        ++lineno;
        std::string_view line = raw;
        auto hash = line.find('#');
        if (hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ParseError("schema line " + std::to_string(lineno) + ": expected key = value");
        std::string key(trim(line.substr(0, eq)));
        std::string_view value = trim(line.substr(eq + 1));
        if (key == "target") {
            schema.target_column = std::string(value);
            have_target = true;
        } else if (key == "sensitive") {
            detail::set_sensitive_rule(schema, value);
            have_sensitive = true;
        } else if (key == "features") {
            schema.feature_columns = detail::name_list(value);
        } else if (key == "categoricals") {
            schema.categorical_columns = detail::name_list(value);
        } else {
            throw ParseError("schema line " + std::to_string(lineno) + ": unknown key '" + key +
                             "'");
        }
    }
    if (!have_target || !have_sensitive)
        throw SchemaMismatch("schema must define target and sensitive");
    std::set<std::string> seen{schema.target_column};
    for (const auto& lists : {schema.feature_columns, schema.categorical_columns})
        for (const std::string& name : lists)
            if (!seen.insert(name).second)
                throw SchemaMismatch("schema column '" + name + "' is listed twice");
    return schema;
}

inline SchemaDescriptor load_schema(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open schema file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_schema(buf.str());
}

// csv ingestion: header required, comma separated, '.' decimals; rows with
// missing values ('' or '?') in any used column are dropped and counted
inline SampleSet load_csv(const std::string& path, const SchemaDescriptor& schema) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open csv file " + path);
    std::string line;
    if (!std::getline(in, line))
        throw ParseError(path + ": empty file, header required");
    if (!line.empty() && line.back() == '\r')
        line.pop_back();

    std::vector<std::string> header;
    for (std::string_view name : split(line, ','))
        header.emplace_back(trim(name));
    auto column_index = [&](const std::string& name) {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end())
            throw SchemaMismatch(path + ": column '" + name + "' not in header");
        return static_cast<std::size_t>(it - header.begin());
    };

    const std::size_t target_idx = column_index(schema.target_column);
    const std::size_t sensitive_idx = column_index(schema.sensitive_column);
    std::vector<std::size_t> feature_idx, cat_idx;
    for (const std::string& name : schema.feature_columns)
        feature_idx.push_back(column_index(name));
    for (const std::string& name : schema.categorical_columns)
        cat_idx.push_back(column_index(name));

    struct RawRow {
        std::vector<double> numeric;
        std::vector<std::string> cats;
        int y;
        int ybar;
    };
    std::vector<RawRow> raw;
    std::vector<std::set<std::string>> levels(cat_idx.size());
    std::size_t dropped = 0;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (trim(line).empty())
            continue;
        std::vector<std::string_view> fields = split(line, ',');
        if (fields.size() != header.size())
            throw ParseError(path + " line " + std::to_string(lineno) + ": expected " +
                             std::to_string(header.size()) + " fields, got " +
                             std::to_string(fields.size()));
        auto field = [&](std::size_t idx) { return trim(fields[idx]); };
        auto missing = [&](std::size_t idx) {
            std::string_view v = field(idx);
            return v.empty() || v == "?";
        };
        bool drop = missing(target_idx) || missing(sensitive_idx);
        for (std::size_t idx : feature_idx)
            drop = drop || missing(idx);
        for (std::size_t idx : cat_idx)
            drop = drop || missing(idx);
        if (drop) {
            ++dropped;
            continue;
        }

        RawRow row;
        std::string_view tv = field(target_idx);
        if (tv == "0")
            row.y = 0;
        else if (tv == "1")
            row.y = 1;
        else
            throw NonBinaryLabel(path + " line " + std::to_string(lineno) + ": target '" +
                                 std::string(tv) + "' is not 0/1");
        if (schema.sensitive_is_threshold) {
            double v = parse_double(field(sensitive_idx),
                                    path + " line " + std::to_string(lineno) + " sensitive");
            row.ybar = v > schema.sensitive_threshold ? 1 : 0;
        } else {
            std::string_view sv = field(sensitive_idx);
            if (sv == "0")
                row.ybar = 0;
            else if (sv == "1")
                row.ybar = 1;
            else
                throw NonBinaryLabel(path + " line " + std::to_string(lineno) + ": sensitive '" +
                                     std::string(sv) + "' is not 0/1");
        }
        for (std::size_t idx : feature_idx)
            row.numeric.push_back(
                parse_double(field(idx), path + " line " + std::to_string(lineno) + " column " +
                                             header[idx]));
        for (std::size_t k = 0; k < cat_idx.size(); ++k) {
            row.cats.emplace_back(field(cat_idx[k]));
            levels[k].insert(row.cats.back());
        }
        raw.push_back(std::move(row));
    }

    // one-hot with sorted levels, first level dropped
    std::vector<std::map<std::string, std::size_t>> level_pos(cat_idx.size());
    std::vector<std::size_t> block_width(cat_idx.size());
    for (std::size_t k = 0; k < cat_idx.size(); ++k) {
        std::size_t pos = 0;
        for (const std::string& lvl : levels[k])
            level_pos[k][lvl] = pos++;
        block_width[k] = levels[k].empty() ? 0 : levels[k].size() - 1;
    }

    SampleSet sample;
    sample.dropped_rows = dropped;
    for (RawRow& row : raw) {
        std::vector<double> x = std::move(row.numeric);
        for (std::size_t k = 0; k < cat_idx.size(); ++k) {
            std::vector<double> block(block_width[k], 0.0);
            std::size_t pos = level_pos[k][row.cats[k]];
            if (pos > 0)
                block[pos - 1] = 1.0;
            x.insert(x.end(), block.begin(), block.end());
        }
        sample.x.push_back(std::move(x));
        sample.y.push_back(row.y);
        sample.ybar.push_back(row.ybar);
        sample.weight.push_back(1.0);
    }
    return sample;
}

// writes a SampleSet to csv with generic headers x1..xd,y,ybar; reload with
// plain_schema(feature_dim)
inline void write_csv(const SampleSet& sample, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write csv file " + path);
    const std::size_t d = sample.feature_dim();
    for (std::size_t j = 0; j < d; ++j)
        out << 'x' << j + 1 << ',';
    out << "y,ybar\n";
    for (std::size_t i = 0; i < sample.size(); ++i) {
        for (std::size_t j = 0; j < d; ++j)
            out << format_double(sample.x[i][j]) << ',';
        out << sample.y[i] << ',' << sample.ybar[i] << '\n';
    }
    if (!out)
        throw IoError("failed while writing " + path);
}

inline SchemaDescriptor plain_schema(std::size_t feature_dim) {
    SchemaDescriptor schema;
    schema.target_column = "y";
    schema.sensitive_column = "ybar";
    for (std::size_t j = 0; j < feature_dim; ++j)
        schema.feature_columns.push_back("x" + std::to_string(j + 1));
    return schema;
}

namespace detail {

inline SampleSet take_rows(const SampleSet& sample, const std::vector<std::size_t>& order,
                           std::size_t begin, std::size_t end) {
    SampleSet out;
    for (std::size_t k = begin; k < end; ++k) {
        std::size_t i = order[k];
        out.x.push_back(sample.x[i]);
        out.y.push_back(sample.y[i]);
        out.ybar.push_back(sample.ybar[i]);
        out.weight.push_back(sample.weight[i]);
    }
    return out;
}

} // namespace detail

// deterministic shuffled partition; train gets ceil(n * fraction) rows
inline std::pair<SampleSet, SampleSet> split(const SampleSet& sample, const SplitSpec& spec) {
    const std::size_t n = sample.size();
    if (n < 2)
        throw TooSmall("split: need at least 2 rows");
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
        throw InvalidArgument("split: train_fraction must be inside (0,1)");
    std::size_t train_n = static_cast<std::size_t>(
        std::ceil(spec.train_fraction * static_cast<double>(n)));
    if (train_n >= n)
        throw TooSmall("split: test side is empty at this fraction");
    Rng rng(spec.seed);
    std::vector<std::size_t> order = rng.permutation(n);
    return {detail::take_rows(sample, order, 0, train_n),
            detail::take_rows(sample, order, train_n, n)};
}

// flips the selected label column independently per row with the given rate
inline SampleSet inject_label_noise(const SampleSet& sample, NoiseChannel channel, double rate,
                                    std::uint64_t seed) {
    if (!(rate >= 0.0 && rate <= 0.5))
        throw InvalidArgument("inject_label_noise: rate must lie in [0, 1/2]");
    SampleSet out = sample;
    Rng rng(seed);
    for (std::size_t i = 0; i < out.size(); ++i) {
        bool flip = rng.bernoulli(rate);
        if (!flip)
            continue;
        if (channel == NoiseChannel::Y)
            out.y[i] = 1 - out.y[i];
        else
            out.ybar[i] = 1 - out.ybar[i];
    }
    return out;
}

// appends squares and pairwise products (i < j) of the feature columns
inline SampleSet quadratic_features(const SampleSet& sample) {
    SampleSet out = sample;
    const std::size_t d = sample.feature_dim();
    for (auto& row : out.x) {
        for (std::size_t j = 0; j < d; ++j)
            row.push_back(row[j] * row[j]);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = i + 1; j < d; ++j)
                row.push_back(row[i] * row[j]);
    }
    return out;
}

} // namespace fairfront
