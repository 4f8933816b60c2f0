#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "sublab/adaptive.hpp"
#include "sublab/response_design.hpp"

namespace sublab {

class SessionError : public std::runtime_error {
public:
    enum class Kind { NotFound, Conflict, Invalid };
    SessionError(Kind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

enum class SessionStatus { Active, Completed, Capped };
std::string session_status_name(SessionStatus s);

struct SessionRequest {
    AdaptiveConfig config;
    int side = 180;  ///< cells per unit edge; point locations are drawn on this grid
    std::optional<std::string> image_url;
    int class_count = 2;
    std::uint64_t seed = 0;
};

/// Parse the POST /sessions body. Throws ConfigError.
SessionRequest session_request_from_json(const nlohmann::json& j);
nlohmann::json session_request_to_json(const SessionRequest& r);

struct SessionPoint {
    int index = 0;
    int row = 0;  ///< cell on the unit grid
    int col = 0;
    double x = 0.0;  ///< unit-relative fraction of the cell centre, in [0, 1)
    double y = 0.0;
    std::optional<int> cls;
};

struct SessionSnapshot {
    std::string session_id;
    SessionStatus status = SessionStatus::Active;
    bool binary = true;
    std::optional<std::string> image_url;
    std::vector<SessionPoint> points;
    std::vector<std::int64_t> tallies;
    std::vector<double> proportions;  ///< empty before the first label
    /// Binary: one Clopper-Pearson interval. Majority: one Goodman interval per class.
    /// Full [0, 1] before any label.
    std::vector<ConfidenceInterval> intervals;
    std::optional<Label> final_label;
    int n_used = 0;
    int n_max = 0;  ///< effective cap

    std::vector<SessionPoint> pending() const;
};

nlohmann::json snapshot_to_json(const SessionSnapshot& s);
nlohmann::json trace_to_json(const std::vector<TraceEntry>& trace);

/// In-memory adaptive labeling sessions. Calls on one session are serialized;
/// distinct sessions proceed concurrently. Decisions come from StopRule only.
class SessionManager {
public:
    /// With a journal path every create/label event is appended as one JSON line.
    explicit SessionManager(std::optional<std::filesystem::path> journal = std::nullopt);

    SessionSnapshot create(const SessionRequest& request);
    SessionSnapshot submit_label(const std::string& id, int point_index, int cls);
    SessionSnapshot get(const std::string& id) const;
    std::vector<TraceEntry> trace(const std::string& id) const;

    /// Rebuild sessions by re-running the events of a journal.
    void replay(std::istream& journal);

    std::size_t size() const;

private:
    struct Session;
    std::shared_ptr<Session> find(const std::string& id) const;
    SessionSnapshot create_with_id(const std::string& id, const SessionRequest& request);
    void journal(const nlohmann::json& event);
    SessionSnapshot apply_label(const std::string& id, int point_index, int cls, bool record);

    mutable std::mutex mutex_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    std::uint64_t counter_ = 0;
    std::mutex journal_mutex_;
    std::optional<std::ofstream> journal_;
};

}  // namespace sublab
