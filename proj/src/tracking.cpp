#include "evdrive/tracking.hpp"

#include <algorithm>
#include <cmath>

#include "evdrive/geometry.hpp"

namespace evdrive {

Association associate(const std::vector<TrackedObject>& tracks,
                      const std::vector<Detection>& detections, double gate) {
    struct Candidate {
        double dist;
        int det;
        int trk;
    };
    std::vector<Candidate> candidates;
    for (int t = 0; t < static_cast<int>(tracks.size()); ++t) {
        for (int d = 0; d < static_cast<int>(detections.size()); ++d) {
            const double dist =
                std::hypot(tracks[t].x - detections[d].x, tracks[t].y - detections[d].y);
            if (dist < gate) candidates.push_back({dist, d, t});
        }
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        if (a.dist != b.dist) return a.dist < b.dist;
        if (a.det != b.det) return a.det < b.det;
        return a.trk < b.trk;
    });

    Association out;
    std::vector<bool> track_used(tracks.size(), false);
    std::vector<bool> det_used(detections.size(), false);
    for (const Candidate& c : candidates) {
        if (track_used[c.trk] || det_used[c.det]) continue;
        track_used[c.trk] = true;
        det_used[c.det] = true;
        out.matches.emplace_back(c.trk, c.det);
    }
    for (int t = 0; t < static_cast<int>(tracks.size()); ++t)
        if (!track_used[t]) out.unmatched_tracks.push_back(t);
    for (int d = 0; d < static_cast<int>(detections.size()); ++d)
        if (!det_used[d]) out.unmatched_detections.push_back(d);
    return out;
}

TrackedObject smooth_update(const TrackedObject& track, const Detection& measured,
                            double alpha) {
    const double a = alpha * measured.confidence;
    TrackedObject out = track;
    out.x = measured.x;
    out.y = measured.y;
    out.vx = a * measured.vx + (1.0 - a) * track.vx;
    out.vy = a * measured.vy + (1.0 - a) * track.vy;
    out.yaw = wrap_angle(track.yaw + a * wrap_angle(measured.yaw - track.yaw));
    out.w = measured.w;
    out.l = measured.l;
    out.confidence = measured.confidence;
    out.age = track.age + 1;
    out.misses = 0;
    return out;
}

void Tracker::update(const std::vector<Detection>& detections, double dt) {
    const Association assoc = associate(tracks_, detections, params_.gate);

    std::vector<TrackedObject> next(tracks_.size());
    std::vector<bool> filled(tracks_.size(), false);
    for (const auto& [trk, det] : assoc.matches) {
        next[trk] = smooth_update(tracks_[trk], detections[det], params_.alpha);
        filled[trk] = true;
    }
    for (int trk : assoc.unmatched_tracks) {
        // Coast on the last smoothed velocity until re-acquired or dropped.
        TrackedObject t = tracks_[trk];
        t.x += t.vx * dt;
        t.y += t.vy * dt;
        t.age += 1;
        t.misses += 1;
        next[trk] = t;
        filled[trk] = true;
    }
    (void)filled;

    // Retire stale tracks, keeping relative order for determinism.
    std::erase_if(next, [&](const TrackedObject& t) { return t.misses > params_.t_drop; });

    for (int det : assoc.unmatched_detections) {
        const Detection& d = detections[det];
        TrackedObject t;
        t.id = next_id_++;
        t.x = d.x;
        t.y = d.y;
        t.vx = d.vx;
        t.vy = d.vy;
        t.yaw = d.yaw;
        t.w = d.w;
        t.l = d.l;
        t.confidence = d.confidence;
        t.age = 1;
        t.misses = 0;
        next.push_back(t);
    }
    tracks_ = std::move(next);
}

void Tracker::reset() {
    tracks_.clear();
    next_id_ = 1;
}

}  // namespace evdrive
