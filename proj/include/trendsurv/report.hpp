#pragma once

#include <cstdio>
#include <string>

#include <json.hpp>

#include "trendsurv/surveillance.hpp"

namespace trendsurv {

enum class RenderFormat { csv, json, markdown };

inline const char* render_format_name(RenderFormat f) {
  switch (f) {
    case RenderFormat::csv: return "csv";
    case RenderFormat::json: return "json";
    case RenderFormat::markdown: return "markdown";
  }
  return "?";
}

namespace detail {

// rho to 3 decimals, p in scientific notation with 3 significant digits.
inline std::string format_rho(double rho) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", rho);
  return buf;
}

inline std::string format_p(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", p);
  return buf;
}

inline std::string class_cell(const RowResult& slot) {
  if (slot.cls) return significance_name(*slot.cls);
  if (!slot.error.empty()) return "error(" + slot.error + ")";
  return "NA";
}

inline nlohmann::ordered_json result_json(const RowResult& slot) {
  nlohmann::ordered_json j;
  if (slot.result) {
    j["r"] = format_rho(slot.result->rho);
    j["p"] = format_p(slot.result->p_value);
    j["class"] = significance_name(*slot.cls);
    nlohmann::ordered_json raw;
    raw["rho"] = slot.result->rho;
    raw["p_value"] = slot.result->p_value;
    raw["n"] = slot.result->n;
    raw["method"] = p_method_name(slot.result->method);
    raw["lag_days"] = slot.result->lag_days;
    raw["degenerate"] = slot.result->degenerate;
    j["raw"] = std::move(raw);
  } else {
    j["error"] = slot.error;
  }
  return j;
}

inline nlohmann::ordered_json config_json(const StudyConfig& c) {
  nlohmann::ordered_json j;
  j["period_start"] = format_date(c.period_start);
  j["period_end"] = format_date(c.period_end);
  j["p_method"] = p_method_name(c.p_method);
  j["weekly_rsv"] = weekly_mode_name(c.weekly_rsv);
  j["alpha"] = c.thresholds.alpha;
  j["high"] = c.thresholds.high;
  j["moderate"] = c.thresholds.moderate;
  j["max_lag"] = c.max_lag;
  j["mc_iterations"] = c.mc_iterations;
  j["seed"] = c.seed;
  return j;
}

}  // namespace detail

// Study table, one row per symptom plus the all-symptoms row, in manifest
// order. Identical reports render to identical bytes.
inline std::string render_table(const StudyReport& report, RenderFormat format) {
  const auto row_cells = [](const StudyRow& row) {
    std::vector<std::string> cells;
    cells.push_back(row.display_name);
    cells.push_back(row.daily.result ? detail::format_rho(row.daily.result->rho) : "NA");
    cells.push_back(row.daily.result ? detail::format_p(row.daily.result->p_value) : "NA");
    cells.push_back(row.weekly.result ? detail::format_rho(row.weekly.result->rho) : "NA");
    cells.push_back(row.weekly.result ? detail::format_p(row.weekly.result->p_value) : "NA");
    cells.push_back(detail::class_cell(row.daily));
    cells.push_back(detail::class_cell(row.weekly));
    cells.push_back(csv::format_value(row.total_rsv));
    return cells;
  };

  switch (format) {
    case RenderFormat::csv: {
      std::string out =
          "symptom,daily_r,daily_p,weekly_r,weekly_p,class_daily,class_weekly,total_rsv\n";
      for (const auto& row : report.rows) {
        const auto cells = row_cells(row);
        for (std::size_t i = 0; i < cells.size(); ++i) {
          if (i) out += ',';
          out += csv::escape(cells[i]);
        }
        out += '\n';
      }
      return out;
    }
    case RenderFormat::markdown: {
      std::string out =
          "| Symptom | Daily r | Daily p | Weekly r | Weekly p | Class (daily) | Class "
          "(weekly) | Total RSV |\n"
          "|---|---|---|---|---|---|---|---|\n";
      for (const auto& row : report.rows) {
        const auto cells = row_cells(row);
        out += '|';
        for (const auto& cell : cells) {
          out += ' ';
          out += cell;
          out += " |";
        }
        out += '\n';
      }
      return out;
    }
    case RenderFormat::json: {
      nlohmann::ordered_json doc;
      doc["n_daily"] = report.n_daily;
      doc["n_weekly"] = report.n_weekly;
      doc["config"] = detail::config_json(report.config);
      doc["rows"] = nlohmann::ordered_json::array();
      for (const auto& row : report.rows) {
        nlohmann::ordered_json r;
        r["symptom"] = row.symptom_id;
        r["display_name"] = row.display_name;
        r["daily"] = detail::result_json(row.daily);
        r["weekly"] = detail::result_json(row.weekly);
        r["total_rsv"] = row.total_rsv;
        doc["rows"].push_back(std::move(r));
      }
      return doc.dump(2) + "\n";
    }
  }
  throw Error(Errc::bad_argument, "unknown render format");
}

// Long-format (date, series, value) rows for one symptom panel: the signal
// block first, then the case block.
inline std::string render_plot_data(const SymptomSignal& signal, const DailySeries& cases,
                                    RenderFormat format) {
  if (signal.daily.start != cases.start || signal.daily.size() != cases.size()) {
    throw Error(Errc::range_mismatch, "signal and cases cover different ranges");
  }
  const std::string case_label = cases.label.empty() ? "cases" : cases.label;
  switch (format) {
    case RenderFormat::csv: {
      std::string out = "date,series,value\n";
      const auto emit = [&](const DailySeries& s, const std::string& label) {
        for (std::size_t i = 0; i < s.size(); ++i) {
          out += format_date(s.date_at(i));
          out += ',';
          out += csv::escape(label);
          out += ',';
          out += csv::format_value(s.values[i]);
          out += '\n';
        }
      };
      emit(signal.daily, signal.symptom_id);
      emit(cases, case_label);
      return out;
    }
    case RenderFormat::markdown: {
      std::string out = "| Date | Series | Value |\n|---|---|---|\n";
      const auto emit = [&](const DailySeries& s, const std::string& label) {
        for (std::size_t i = 0; i < s.size(); ++i) {
          out += "| " + format_date(s.date_at(i)) + " | " + label + " | " +
                 csv::format_value(s.values[i]) + " |\n";
        }
      };
      emit(signal.daily, signal.symptom_id);
      emit(cases, case_label);
      return out;
    }
    case RenderFormat::json: {
      nlohmann::ordered_json rows = nlohmann::ordered_json::array();
      const auto emit = [&](const DailySeries& s, const std::string& label) {
        for (std::size_t i = 0; i < s.size(); ++i) {
          nlohmann::ordered_json r;
          r["date"] = format_date(s.date_at(i));
          r["series"] = label;
          r["value"] = s.values[i];
          rows.push_back(std::move(r));
        }
      };
      emit(signal.daily, signal.symptom_id);
      emit(cases, case_label);
      return rows.dump(2) + "\n";
    }
  }
  throw Error(Errc::bad_argument, "unknown render format");
}

}  // namespace trendsurv
