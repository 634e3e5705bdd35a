#include "racectl/raceline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace racectl {

namespace {

// Maximal runs of consecutive arc segments ("corners") with the straight gaps
// around them, in station terms on the closed track.
struct Corner {
  double s_begin;     // station where the arc run starts
  double s_end;       // station where it ends
  double turn_sign;   // +1 left, -1 right (sign of net sweep)
  double gap_before;  // length of the straight run preceding it
  double gap_after;   // length of the straight run following it
};

std::vector<Corner> find_corners(const Track& track) {
  const auto& segs = track.segments();
  const size_t n = segs.size();
  std::vector<Corner> corners;
  size_t i = 0;
  while (i < n) {
    if (segs[i].kind != SegmentKind::kArc) {
      ++i;
      continue;
    }
    size_t j = i;
    double sweep = 0.0;
    while (j < n && segs[j].kind == SegmentKind::kArc) {
      sweep += segs[j].sweep;
      ++j;
    }
    Corner c{};
    c.s_begin = segs[i].s0;
    c.s_end = (j < n) ? segs[j].s0 : track.length();
    c.turn_sign = (sweep >= 0.0) ? 1.0 : -1.0;
    corners.push_back(c);
    i = j;
  }
  for (size_t k = 0; k < corners.size(); ++k) {
    const size_t prev = (k == 0) ? corners.size() - 1 : k - 1;
    double gap = corners[k].s_begin - corners[prev].s_end;
    if (gap < 0.0) gap += track.length();
    corners[k].gap_before = gap;
    corners[prev].gap_after = gap;
  }
  return corners;
}

// Smooth 0->1 cosine ramp.
double ramp(double u) { return 0.5 * (1.0 - std::cos(kPi * std::clamp(u, 0.0, 1.0))); }

}  // namespace

Raceline generate_raceline(const Track& track, const RacelineParams& p) {
  if (!(p.sample_spacing > 0.0)) throw RacelineError("sample_spacing must be > 0");
  if (p.entry_fraction < 0.0 || p.exit_fraction < 0.0 ||
      p.entry_fraction + p.exit_fraction > 1.0)
    throw RacelineError("entry/exit fractions must be >= 0 and sum to <= 1");
  const double w = track.width();
  const double margin = p.vehicle_half_width;
  if (p.apex_inset < 0.0) throw RacelineError("apex_inset must be >= 0");
  if (0.5 * w - p.apex_inset < margin)
    throw RacelineError("apex_inset infeasible for this track width");

  const auto corners = find_corners(track);

  // Lateral offset y(s): wide side on the straights, pulled to the apex side
  // through each corner with cosine blends over fractions of the adjacent
  // straights. Zero inset (or a cornerless track) degenerates to the
  // centerline.
  auto offset_of = [&](double s) {
    const double center = 0.5 * w;
    if (corners.empty() || p.apex_inset == 0.0) return center;
    for (const auto& c : corners) {
      const double out = center + c.turn_sign * p.apex_inset;   // wide side
      const double apex = center - c.turn_sign * p.apex_inset;  // apex side
      const double entry_len = p.entry_fraction * c.gap_before;
      const double exit_len = p.exit_fraction * c.gap_after;
      const double mid = 0.5 * (c.s_begin + c.s_end);
      const double half_span = 0.5 * (c.s_end - c.s_begin);
      const double rel = track.wrap_rel(s - mid);
      if (rel >= -half_span - entry_len && rel <= 0.0) {
        // Entry: wide -> apex, reaching the apex at the corner midpoint.
        const double u = (rel + half_span + entry_len) / (half_span + entry_len);
        return out + (apex - out) * ramp(u);
      }
      if (rel > 0.0 && rel <= half_span + exit_len) {
        // Exit: apex -> wide.
        return apex + (out - apex) * ramp(rel / (half_span + exit_len));
      }
    }
    // Uncovered straight stretch: hold the wide side of the nearest corner
    // (interpolate when neighbouring corners disagree on the wide side).
    const Corner* before = nullptr;
    const Corner* after = nullptr;
    double d_before = 1e18, d_after = 1e18;
    for (const auto& c : corners) {
      double db = track.wrap_rel(s - c.s_end);
      if (db < 0.0) db += track.length();
      double da = track.wrap_rel(c.s_begin - s);
      if (da < 0.0) da += track.length();
      if (db < d_before) {
        d_before = db;
        before = &c;
      }
      if (da < d_after) {
        d_after = da;
        after = &c;
      }
    }
    const double out_b = center + before->turn_sign * p.apex_inset;
    const double out_a = center + after->turn_sign * p.apex_inset;
    const double span = d_before + d_after;
    const double u = (span > 1e-9) ? d_before / span : 0.0;
    return out_b + (out_a - out_b) * ramp(u);
  };

  // Sample the path.
  const double L = track.length();
  const size_t n = std::max<size_t>(8, static_cast<size_t>(std::ceil(L / p.sample_spacing)));
  const double ds = L / static_cast<double>(n);
  Raceline line;
  line.track_length = L;
  line.closed = true;
  line.samples.resize(n);
  for (size_t i = 0; i < n; ++i) {
    const double s = ds * static_cast<double>(i);
    const double y = offset_of(s);
    if (y < margin - 1e-9 || y > w - margin + 1e-9)
      throw RacelineError("race line leaves the drivable corridor");
    const Vec2 pos = track.position(s, y);
    line.samples[i] = {s, pos.x, pos.y, 0.0};
  }

  // Curvature of the sampled closed polyline: circumcircle of point triples.
  std::vector<double> kappa(n, 0.0);
  for (size_t i = 0; i < n; ++i) {
    const auto& a = line.samples[(i + n - 1) % n];
    const auto& b = line.samples[i];
    const auto& c = line.samples[(i + 1) % n];
    const Vec2 ab{b.x - a.x, b.y - a.y};
    const Vec2 bc{c.x - b.x, c.y - b.y};
    const Vec2 ac{c.x - a.x, c.y - a.y};
    const double denom = ab.norm() * bc.norm() * ac.norm();
    kappa[i] = (denom > 1e-12) ? 2.0 * ab.cross(bc) / denom : 0.0;
  }

  // Speed solve: lateral envelope fixed point (downforce makes the limit
  // speed-dependent), then longitudinal brake/accel smoothing around the loop.
  std::vector<double> v(n, p.v_max);
  for (size_t i = 0; i < n; ++i) {
    const double k = std::abs(kappa[i]);
    if (k < 1e-9) continue;
    double vi = p.v_max;
    for (int it = 0; it < 64; ++it) {
      const double vn = std::min(p.v_max, std::sqrt(p.lat_fraction * p.lat.limit(vi) / k));
      if (std::abs(vn - vi) < 1e-9) {
        vi = vn;
        break;
      }
      vi = vn;
    }
    v[i] = vi;
  }
  const double ds_ground = [&] {
    double total = 0.0;
    for (size_t i = 0; i < n; ++i) {
      const auto& a = line.samples[i];
      const auto& b = line.samples[(i + 1) % n];
      total += std::hypot(b.x - a.x, b.y - a.y);
    }
    return total / static_cast<double>(n);
  }();
  // Two passes around the loop each way so the wrap seam is consistent.
  for (size_t i = 4 * n; i-- > 0;) {
    const size_t cur = i % n;
    const size_t nxt = (cur + 1) % n;
    v[cur] = std::min(v[cur], std::sqrt(v[nxt] * v[nxt] + 2.0 * p.a_brake * ds_ground));
  }
  for (size_t i = 0; i < 4 * n; ++i) {
    const size_t cur = i % n;
    const size_t prv = (cur + n - 1) % n;
    v[cur] = std::min(v[cur], std::sqrt(v[prv] * v[prv] + 2.0 * p.a_accel * ds_ground));
  }
  for (size_t i = 0; i < n; ++i) line.samples[i].v = v[i];
  return line;
}

void save_raceline_csv(const Raceline& line, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw RacelineError("cannot open race line file for writing: " + path);
  out << "s,x,y,v\n";
  char buf[160];
  for (const auto& smp : line.samples) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n", smp.s, smp.x, smp.y, smp.v);
    out << buf;
  }
}

Raceline load_raceline_csv(const std::string& path, const Track& track) {
  std::ifstream in(path);
  if (!in) throw RacelineError("cannot open race line file: " + path);
  std::string header;
  if (!std::getline(in, header)) throw RacelineError("race line file is empty: " + path);
  if (header != "s,x,y,v")
    throw RacelineError("race line header must be 's,x,y,v', got '" + header + "'");
  Raceline line;
  line.track_length = track.length();
  line.closed = true;
  std::string row;
  int lineno = 1;
  const double w = track.width();
  while (std::getline(in, row)) {
    ++lineno;
    if (row.empty()) continue;
    RacelineSample smp;
    char extra;
    std::istringstream rs(row);
    char c1, c2, c3;
    if (!(rs >> smp.s >> c1 >> smp.x >> c2 >> smp.y >> c3 >> smp.v) || c1 != ',' ||
        c2 != ',' || c3 != ',' || (rs >> extra))
      throw RacelineError("race line row " + std::to_string(lineno) + " is malformed");
    if (!(smp.v > 0.0))
      throw RacelineError("race line row " + std::to_string(lineno) +
                          ": speed must be > 0");
    if (!line.samples.empty() && !(smp.s > line.samples.back().s))
      throw RacelineError("race line row " + std::to_string(lineno) +
                          ": station must increase monotonically");
    const auto proj = track.project({smp.x, smp.y});
    if (proj.y < -1e-6 || proj.y > w + 1e-6)
      throw RacelineError("race line row " + std::to_string(lineno) +
                          ": sample lies outside the track");
    line.samples.push_back(smp);
  }
  if (line.samples.size() < 2) throw RacelineError("race line needs at least two samples");
  if (line.samples.back().s >= track.length())
    throw RacelineError("race line stations must stay below the track length");
  return line;
}

RacelineView::RacelineView(const Track& track, const Raceline& line)
    : track_(&track), line_(line) {
  const size_t n = line_.samples.size();
  if (n < 2) throw RacelineError("race line view needs at least two samples");
  offset_.resize(n);
  speed_.resize(n);
  station_.resize(n);
  for (size_t i = 0; i < n; ++i) {
    station_[i] = line_.samples[i].s;
    speed_[i] = line_.samples[i].v;
    const auto proj = track_->project({line_.samples[i].x, line_.samples[i].y});
    offset_[i] = proj.y;
  }
}

double RacelineView::interp(const std::vector<double>& vals, double station) const {
  const double L = line_.track_length;
  double s = std::fmod(station, L);
  if (s < 0.0) s += L;
  const auto it = std::upper_bound(station_.begin(), station_.end(), s);
  size_t j = static_cast<size_t>(std::distance(station_.begin(), it));
  const size_t n = station_.size();
  const size_t i0 = (j == 0) ? n - 1 : j - 1;
  const size_t i1 = (j >= n) ? 0 : j;
  double span = station_[i1] - station_[i0];
  if (span <= 0.0) span += L;
  double rel = s - station_[i0];
  if (rel < 0.0) rel += L;
  const double w = (span > 1e-12) ? rel / span : 0.0;
  return vals[i0] + w * (vals[i1] - vals[i0]);
}

double RacelineView::speed_at(double station) const { return interp(speed_, station); }

double RacelineView::offset_at(double station) const { return interp(offset_, station); }

double RacelineView::offset_slope_at(double station) const {
  const double h = 1.0;  // m
  return (offset_at(station + h) - offset_at(station - h)) / (2.0 * h);
}

}  // namespace racectl
