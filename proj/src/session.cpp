#include "sublab/session.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <numeric>

#include "sublab/config.hpp"
#include "sublab/rng.hpp"

using nlohmann::json;

namespace sublab {

std::string session_status_name(SessionStatus s) {
    switch (s) {
        case SessionStatus::Active:
            return "active";
        case SessionStatus::Completed:
            return "completed";
        case SessionStatus::Capped:
            return "capped";
    }
    return "?";
}

SessionRequest session_request_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("request", "expected an object");
    static const char* const allowed[] = {"legend", "alpha",    "n_init",      "n_max", "increment",
                                          "unit",   "image_url", "class_count", "seed"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::find(std::begin(allowed), std::end(allowed), it.key()) == std::end(allowed)) {
            throw ConfigError(it.key(), "unknown field");
        }
    }
    SessionRequest r;
    auto number = [&](const char* key) {
        if (!j[key].is_number()) throw ConfigError(key, "expected a number");
        return j[key].get<double>();
    };
    auto integer = [](const json& obj, const std::string& path) {
        if (!obj.is_number_integer()) throw ConfigError(path, "expected an integer");
        return obj.get<long long>();
    };
    if (!j.contains("legend")) throw ConfigError("legend", "required");
    r.config.legend = legend_from_json(j["legend"], "legend");
    if (j.contains("alpha")) r.config.alpha = number("alpha");
    if (j.contains("n_init")) r.config.n_init = static_cast<int>(integer(j["n_init"], "n_init"));
    if (j.contains("n_max")) r.config.n_max = static_cast<int>(integer(j["n_max"], "n_max"));
    if (j.contains("increment")) r.config.increment = static_cast<int>(integer(j["increment"], "increment"));
    if (j.contains("seed")) {
        const auto s = integer(j["seed"], "seed");
        if (s < 0) throw ConfigError("seed", "must be non-negative");
        r.seed = static_cast<std::uint64_t>(s);
    }
    if (j.contains("image_url")) {
        if (!j["image_url"].is_string()) throw ConfigError("image_url", "expected a string");
        r.image_url = j["image_url"].get<std::string>();
        r.side = 1000;
    }
    if (j.contains("unit")) {
        const auto& u = j["unit"];
        if (!u.is_object() || !u.contains("side")) throw ConfigError("unit", "expected {\"side\": n}");
        r.side = static_cast<int>(integer(u["side"], "unit.side"));
    } else if (!r.image_url) {
        throw ConfigError("unit", "one of unit or image_url is required");
    }
    if (j.contains("class_count")) {
        r.class_count = static_cast<int>(integer(j["class_count"], "class_count"));
    } else if (r.config.legend.is_binary()) {
        const auto& t = r.config.legend.binary_rule().target_classes;
        r.class_count = std::max(2, *std::max_element(t.begin(), t.end()) + 1);
    } else {
        throw ConfigError("class_count", "required for a majority legend");
    }

    if (!(r.config.alpha > 0.0 && r.config.alpha < 1.0)) throw ConfigError("alpha", "must lie in (0, 1)");
    if (r.config.n_init < 1) throw ConfigError("n_init", "must be >= 1");
    if (r.config.n_max < r.config.n_init) throw ConfigError("n_max", "must be >= n_init");
    if (r.config.increment < 1) throw ConfigError("increment", "must be >= 1");
    if (r.side < 1 || r.side > 100000) throw ConfigError("unit.side", "must lie in [1, 100000]");
    if (r.class_count < 2 || r.class_count > 65536) throw ConfigError("class_count", "must lie in [2, 65536]");
    try {
        r.config.legend.check_classes(r.class_count);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("legend", e.what());
    }
    return r;
}

json session_request_to_json(const SessionRequest& r) {
    json j{{"legend", legend_to_json(r.config.legend)},
           {"alpha", r.config.alpha},
           {"n_init", r.config.n_init},
           {"n_max", r.config.n_max},
           {"increment", r.config.increment},
           {"unit", {{"side", r.side}}},
           {"class_count", r.class_count},
           {"seed", r.seed}};
    if (r.image_url) j["image_url"] = *r.image_url;
    return j;
}

std::vector<SessionPoint> SessionSnapshot::pending() const {
    std::vector<SessionPoint> out;
    for (const auto& p : points) {
        if (!p.cls) out.push_back(p);
    }
    return out;
}

namespace {

json interval_json(const ConfidenceInterval& ci) { return {{"lower", ci.lower}, {"upper", ci.upper}}; }

json label_json(const Label& l, bool binary) {
    json j{{"value", l.value}, {"tie", l.tie}};
    if (binary) j["present"] = l.present();
    return j;
}

}  // namespace

json snapshot_to_json(const SessionSnapshot& s) {
    json points = json::array();
    json proposed = json::array();
    for (const auto& p : s.points) {
        json pj{{"index", p.index}, {"x", p.x}, {"y", p.y}};
        if (!p.cls) proposed.push_back(pj);
        pj["class"] = p.cls ? json(*p.cls) : json(nullptr);
        points.push_back(pj);
    }
    json j{{"session_id", s.session_id},
           {"status", session_status_name(s.status)},
           {"legend_type", s.binary ? "binary" : "majority"},
           {"tallies", s.tallies},
           {"proportions", s.proportions},
           {"n_used", s.n_used},
           {"n_max", s.n_max},
           {"proposed_points", proposed},
           {"points", points}};
    if (s.binary) {
        j["ci"] = interval_json(s.intervals.front());
    } else {
        json list = json::array();
        for (const auto& ci : s.intervals) list.push_back(interval_json(ci));
        j["ci"] = list;
    }
    if (s.final_label) j["final_label"] = label_json(*s.final_label, s.binary);
    if (s.image_url) j["image_url"] = *s.image_url;
    return j;
}

json trace_to_json(const std::vector<TraceEntry>& trace) {
    json arr = json::array();
    for (const auto& t : trace) {
        json cis = json::array();
        for (const auto& ci : t.decision.intervals) cis.push_back(interval_json(ci));
        json e{{"n", t.n}, {"tallies", t.tallies}, {"status", status_name(t.decision.status)}, {"intervals", cis}};
        if (t.decision.status != StopStatus::Continue) e["label"] = t.decision.label.value;
        arr.push_back(e);
    }
    return arr;
}

struct SessionManager::Session {
    Session(std::string id_, const SessionRequest& req)
        : id(std::move(id_)),
          request(req),
          rule(req.config, req.class_count, static_cast<std::size_t>(req.side) * req.side, false),
          stream(static_cast<std::size_t>(req.side) * req.side, req.seed),
          tallies(static_cast<std::size_t>(req.class_count), 0) {}

    void propose(int count) {
        for (int i = 0; i < count; ++i) {
            const std::size_t cell = stream.next();
            SessionPoint p;
            p.index = static_cast<int>(points.size());
            p.row = static_cast<int>(cell / static_cast<std::size_t>(request.side));
            p.col = static_cast<int>(cell % static_cast<std::size_t>(request.side));
            p.x = (p.col + 0.5) / request.side;
            p.y = (p.row + 0.5) / request.side;
            points.push_back(p);
        }
    }

    SessionSnapshot snapshot() const {
        SessionSnapshot s;
        s.session_id = id;
        s.status = status;
        s.binary = request.config.legend.is_binary();
        s.image_url = request.image_url;
        s.points = points;
        s.tallies = tallies;
        s.n_used = static_cast<int>(std::accumulate(tallies.begin(), tallies.end(), std::int64_t{0}));
        s.n_max = rule.cap();
        s.final_label = final_label;
        const double alpha = request.config.alpha;
        if (s.n_used == 0) {
            s.intervals.assign(s.binary ? 1 : tallies.size(), ConfidenceInterval{0.0, 1.0, 1.0 - alpha});
            return s;
        }
        s.proportions.resize(tallies.size());
        for (std::size_t i = 0; i < tallies.size(); ++i) {
            s.proportions[i] = static_cast<double>(tallies[i]) / static_cast<double>(s.n_used);
        }
        if (s.binary) {
            std::int64_t m = 0;
            for (int c : request.config.legend.binary_rule().target_classes) m += tallies[static_cast<std::size_t>(c)];
            s.intervals = {clopper_pearson(m, s.n_used, alpha)};
        } else {
            s.intervals = goodman_intervals(tallies, alpha);
        }
        return s;
    }

    std::string id;
    SessionRequest request;
    StopRule rule;
    PointStream stream;
    std::vector<SessionPoint> points;
    std::vector<std::int64_t> tallies;
    std::vector<TraceEntry> trace;
    SessionStatus status = SessionStatus::Active;
    std::optional<Label> final_label;
    mutable std::mutex mutex;
};

SessionManager::SessionManager(std::optional<std::filesystem::path> journal) {
    if (journal) {
        journal_.emplace(*journal, std::ios::app);
        if (!*journal_) throw std::runtime_error("cannot open journal " + journal->string());
    }
}

void SessionManager::journal(const json& event) {
    if (!journal_) return;
    std::lock_guard lock(journal_mutex_);
    *journal_ << event.dump() << '\n';
    journal_->flush();
}

std::shared_ptr<SessionManager::Session> SessionManager::find(const std::string& id) const {
    std::lock_guard lock(mutex_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw SessionError(SessionError::Kind::NotFound, "unknown session '" + id + "'");
    return it->second;
}

SessionSnapshot SessionManager::create_with_id(const std::string& id, const SessionRequest& request) {
    std::shared_ptr<Session> s;
    try {
        s = std::make_shared<Session>(id, request);
    } catch (const std::invalid_argument& e) {
        throw SessionError(SessionError::Kind::Invalid, e.what());
    }
    s->propose(s->rule.initial());
    auto snap = s->snapshot();
    std::lock_guard lock(mutex_);
    if (!sessions_.emplace(id, std::move(s)).second) {
        throw SessionError(SessionError::Kind::Conflict, "session '" + id + "' exists");
    }
    return snap;
}

SessionSnapshot SessionManager::create(const SessionRequest& request) {
    std::uint64_t n;
    {
        std::lock_guard lock(mutex_);
        n = ++counter_;
    }
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%016llx-%llu", static_cast<unsigned long long>(derive_seed(request.seed, {n})),
                  static_cast<unsigned long long>(n));
    auto snap = create_with_id(buf, request);
    journal({{"event", "create"}, {"session_id", snap.session_id}, {"request", session_request_to_json(request)}});
    return snap;
}

SessionSnapshot SessionManager::submit_label(const std::string& id, int point_index, int cls) {
    return apply_label(id, point_index, cls, true);
}

SessionSnapshot SessionManager::apply_label(const std::string& id, int point_index, int cls, bool record) {
    auto s = find(id);
    std::lock_guard lock(s->mutex);
    if (s->status != SessionStatus::Active) {
        throw SessionError(SessionError::Kind::Conflict, "session '" + id + "' is " + session_status_name(s->status));
    }
    if (point_index < 0 || point_index >= static_cast<int>(s->points.size())) {
        throw SessionError(SessionError::Kind::Invalid, "no proposed point " + std::to_string(point_index));
    }
    if (cls < 0 || cls >= s->request.class_count) {
        throw SessionError(SessionError::Kind::Invalid, "class " + std::to_string(cls) + " outside [0, " +
                                                            std::to_string(s->request.class_count) + ")");
    }
    auto& point = s->points[static_cast<std::size_t>(point_index)];
    if (point.cls) {
        throw SessionError(SessionError::Kind::Conflict, "point " + std::to_string(point_index) + " already labeled");
    }
    point.cls = cls;
    ++s->tallies[static_cast<std::size_t>(cls)];

    const bool batch_done = std::all_of(s->points.begin(), s->points.end(), [](const SessionPoint& p) { return p.cls; });
    if (batch_done) {
        StopDecision d = s->rule.step(s->tallies);
        const int n = static_cast<int>(s->points.size());
        const StopStatus status = d.status;
        const Label label = d.label;
        s->trace.push_back({n, s->tallies, std::move(d)});
        if (status == StopStatus::Continue) {
            s->propose(std::min(s->rule.config().increment, s->rule.cap() - n));
        } else {
            s->final_label = label;
            s->status = status == StopStatus::StopConfident ? SessionStatus::Completed : SessionStatus::Capped;
        }
    }
    if (record) journal({{"event", "label"}, {"session_id", id}, {"point_index", point_index}, {"class", cls}});
    return s->snapshot();
}

SessionSnapshot SessionManager::get(const std::string& id) const {
    auto s = find(id);
    std::lock_guard lock(s->mutex);
    return s->snapshot();
}

std::vector<TraceEntry> SessionManager::trace(const std::string& id) const {
    auto s = find(id);
    std::lock_guard lock(s->mutex);
    return s->trace;
}

std::size_t SessionManager::size() const {
    std::lock_guard lock(mutex_);
    return sessions_.size();
}

void SessionManager::replay(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            const json e = json::parse(line);
            const std::string kind = e.at("event").get<std::string>();
            const std::string id = e.at("session_id").get<std::string>();
            if (kind == "create") {
                create_with_id(id, session_request_from_json(e.at("request")));
                const auto dash = id.rfind('-');
                if (dash != std::string::npos) {
                    std::lock_guard lock(mutex_);
                    counter_ = std::max<std::uint64_t>(counter_, std::stoull(id.substr(dash + 1)));
                }
            } else if (kind == "label") {
                apply_label(id, e.at("point_index").get<int>(), e.at("class").get<int>(), false);
            } else {
                throw std::runtime_error("unknown event '" + kind + "'");
            }
        } catch (const std::exception& ex) {
            throw std::runtime_error("journal line " + std::to_string(line_no) + ": " + ex.what());
        }
    }
}

}  // namespace sublab
