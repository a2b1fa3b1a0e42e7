//! Time scales: closed subsets of the reals built from finitely many
//! intervals and discrete points, with jump operators and grids.
//!
//! A [`TimeScale`] is stored in canonical form: components sorted
//! ascending, pairwise disjoint, never touching (a point equal to an
//! interval endpoint is absorbed into the interval, overlapping or
//! touching intervals are merged). Membership is structural via
//! [`PointRef`], so the jump operators never have to guess whether two
//! floats "mean" the same scale element.

use std::fmt;

use thiserror::Error;

/// One building block of a scale: a closed interval `[lo, hi]` with
/// `lo < hi`, or a strictly increasing block of isolated points.
#[derive(Debug, Clone, PartialEq)]
pub enum Component {
    Interval { lo: f64, hi: f64 },
    Points(Vec<f64>),
}

/// Raw (not yet canonicalized) component as supplied by a caller.
#[derive(Debug, Clone, PartialEq)]
pub enum RawComponent {
    Interval { lo: f64, hi: f64 },
    Points(Vec<f64>),
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ScaleError {
    #[error("empty scale specification")]
    EmptyScale,
    #[error("contradictory interval: lo {lo} > hi {hi}")]
    InvalidInterval { lo: f64, hi: f64 },
    #[error("non-finite coordinate in scale specification")]
    NonFinite,
    #[error("point {0} is not on the scale")]
    NotOnScale(f64),
    #[error("invalid range: {a} > {b}")]
    InvalidRange { a: f64, b: f64 },
    #[error("scale literal error at column {col}: {msg}")]
    Literal { col: usize, msg: String },
}

/// Structural handle to one element of a scale.
///
/// `component` indexes into the canonical component list; the location
/// is either an index into a discrete block or a coordinate inside an
/// interval (endpoints included). Two refs to the same element compare
/// equal because canonical scales give every element a unique spot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointRef {
    pub component: usize,
    pub location: Location,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Location {
    /// Index into a `Points` block.
    Discrete(usize),
    /// Coordinate inside an `Interval` component, `lo <= t <= hi`.
    Interior(f64),
}

/// Density of a point on one side: `Scattered` iff the graininess on
/// that side is positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Dense,
    Scattered,
}

/// Two-sided classification of a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PointClass {
    pub right: Side,
    pub left: Side,
}

/// An ordered union of closed intervals and discrete points.
///
/// Immutable after construction; all operations are pure reads.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeScale {
    components: Vec<Component>,
}

impl TimeScale {
    /// Builds the canonical scale for the union of the raw components.
    ///
    /// Sorts, merges touching/overlapping pieces, deduplicates points
    /// and absorbs points lying inside (or on the boundary of) an
    /// interval. A degenerate interval `[a, a]` becomes the point `a`.
    pub fn new(raw: Vec<RawComponent>) -> Result<TimeScale, ScaleError> {
        if raw.is_empty() {
            return Err(ScaleError::EmptyScale);
        }
        let mut intervals: Vec<(f64, f64)> = Vec::new();
        let mut points: Vec<f64> = Vec::new();
        for c in raw {
            match c {
                RawComponent::Interval { lo, hi } => {
                    if !lo.is_finite() || !hi.is_finite() {
                        return Err(ScaleError::NonFinite);
                    }
                    if lo > hi {
                        return Err(ScaleError::InvalidInterval { lo, hi });
                    }
                    if lo == hi {
                        points.push(lo + 0.0);
                    } else {
                        // `+ 0.0` canonicalizes -0.0 to 0.0
                        intervals.push((lo + 0.0, hi + 0.0));
                    }
                }
                RawComponent::Points(ps) => {
                    for p in ps {
                        if !p.is_finite() {
                            return Err(ScaleError::NonFinite);
                        }
                        points.push(p + 0.0);
                    }
                }
            }
        }

        intervals.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::new();
        for (lo, hi) in intervals {
            match merged.last_mut() {
                Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
                _ => merged.push((lo, hi)),
            }
        }

        points.sort_by(f64::total_cmp);
        points.dedup();
        points.retain(|&p| !merged.iter().any(|&(lo, hi)| lo <= p && p <= hi));

        // Interleave interval and point runs in ascending order.
        let mut components: Vec<Component> = Vec::new();
        let mut run: Vec<f64> = Vec::new();
        let mut pi = 0;
        for (lo, hi) in merged {
            while pi < points.len() && points[pi] < lo {
                run.push(points[pi]);
                pi += 1;
            }
            if !run.is_empty() {
                components.push(Component::Points(std::mem::take(&mut run)));
            }
            components.push(Component::Interval { lo, hi });
        }
        run.extend_from_slice(&points[pi..]);
        if !run.is_empty() {
            components.push(Component::Points(run));
        }

        if components.is_empty() {
            return Err(ScaleError::EmptyScale);
        }
        Ok(TimeScale { components })
    }

    /// Convenience constructor for one discrete block.
    pub fn from_points(points: Vec<f64>) -> Result<TimeScale, ScaleError> {
        TimeScale::new(vec![RawComponent::Points(points)])
    }

    /// Convenience constructor for a single interval `[lo, hi]`.
    pub fn interval(lo: f64, hi: f64) -> Result<TimeScale, ScaleError> {
        TimeScale::new(vec![RawComponent::Interval { lo, hi }])
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn min(&self) -> f64 {
        match &self.components[0] {
            Component::Interval { lo, .. } => *lo,
            Component::Points(ps) => ps[0],
        }
    }

    pub fn max(&self) -> f64 {
        match self.components.last().unwrap() {
            Component::Interval { hi, .. } => *hi,
            Component::Points(ps) => *ps.last().unwrap(),
        }
    }

    pub fn min_ref(&self) -> PointRef {
        match &self.components[0] {
            Component::Interval { lo, .. } => PointRef {
                component: 0,
                location: Location::Interior(*lo),
            },
            Component::Points(_) => PointRef {
                component: 0,
                location: Location::Discrete(0),
            },
        }
    }

    pub fn max_ref(&self) -> PointRef {
        let c = self.components.len() - 1;
        match &self.components[c] {
            Component::Interval { hi, .. } => PointRef {
                component: c,
                location: Location::Interior(*hi),
            },
            Component::Points(ps) => PointRef {
                component: c,
                location: Location::Discrete(ps.len() - 1),
            },
        }
    }

    /// True when the scale has no interval components.
    pub fn is_discrete(&self) -> bool {
        self.components
            .iter()
            .all(|c| matches!(c, Component::Points(_)))
    }

    /// The coordinate a point ref stands for.
    pub fn coord(&self, p: PointRef) -> f64 {
        match (&self.components[p.component], p.location) {
            (Component::Points(ps), Location::Discrete(i)) => ps[i],
            (Component::Interval { .. }, Location::Interior(t)) => t,
            _ => panic!("point ref does not match scale structure"),
        }
    }

    /// Structural membership: exact match for discrete points,
    /// containment for intervals. No epsilon.
    pub fn locate(&self, t: f64) -> Result<PointRef, ScaleError> {
        if !t.is_finite() {
            return Err(ScaleError::NonFinite);
        }
        let t = t + 0.0;
        for (ci, c) in self.components.iter().enumerate() {
            match c {
                Component::Interval { lo, hi } => {
                    if *lo <= t && t <= *hi {
                        return Ok(PointRef {
                            component: ci,
                            location: Location::Interior(t),
                        });
                    }
                }
                Component::Points(ps) => {
                    if let Ok(i) = ps.binary_search_by(|x| x.total_cmp(&t)) {
                        return Ok(PointRef {
                            component: ci,
                            location: Location::Discrete(i),
                        });
                    }
                }
            }
        }
        Err(ScaleError::NotOnScale(t))
    }

    fn first_ref_of(&self, ci: usize) -> PointRef {
        match &self.components[ci] {
            Component::Interval { lo, .. } => PointRef {
                component: ci,
                location: Location::Interior(*lo),
            },
            Component::Points(_) => PointRef {
                component: ci,
                location: Location::Discrete(0),
            },
        }
    }

    fn last_ref_of(&self, ci: usize) -> PointRef {
        match &self.components[ci] {
            Component::Interval { hi, .. } => PointRef {
                component: ci,
                location: Location::Interior(*hi),
            },
            Component::Points(ps) => PointRef {
                component: ci,
                location: Location::Discrete(ps.len() - 1),
            },
        }
    }

    /// Forward jump operator. `sigma(max) == max`; at a right-dense
    /// point it is the point itself.
    pub fn sigma(&self, p: PointRef) -> PointRef {
        match (&self.components[p.component], p.location) {
            (Component::Interval { hi, .. }, Location::Interior(t)) => {
                if t < *hi {
                    p
                } else if p.component + 1 < self.components.len() {
                    self.first_ref_of(p.component + 1)
                } else {
                    p
                }
            }
            (Component::Points(ps), Location::Discrete(i)) => {
                if i + 1 < ps.len() {
                    PointRef {
                        component: p.component,
                        location: Location::Discrete(i + 1),
                    }
                } else if p.component + 1 < self.components.len() {
                    self.first_ref_of(p.component + 1)
                } else {
                    p
                }
            }
            _ => panic!("point ref does not match scale structure"),
        }
    }

    /// Backward jump operator, mirror of [`TimeScale::sigma`].
    pub fn rho(&self, p: PointRef) -> PointRef {
        match (&self.components[p.component], p.location) {
            (Component::Interval { lo, .. }, Location::Interior(t)) => {
                if t > *lo {
                    p
                } else if p.component > 0 {
                    self.last_ref_of(p.component - 1)
                } else {
                    p
                }
            }
            (Component::Points(_), Location::Discrete(i)) => {
                if i > 0 {
                    PointRef {
                        component: p.component,
                        location: Location::Discrete(i - 1),
                    }
                } else if p.component > 0 {
                    self.last_ref_of(p.component - 1)
                } else {
                    p
                }
            }
            _ => panic!("point ref does not match scale structure"),
        }
    }

    /// Forward graininess `mu(t) = sigma(t) - t`.
    pub fn mu(&self, p: PointRef) -> f64 {
        self.coord(self.sigma(p)) - self.coord(p)
    }

    /// Backward graininess `nu(t) = t - rho(t)`.
    pub fn nu(&self, p: PointRef) -> f64 {
        self.coord(p) - self.coord(self.rho(p))
    }

    pub fn classify(&self, p: PointRef) -> PointClass {
        let t = self.coord(p);
        PointClass {
            right: if self.coord(self.sigma(p)) > t {
                Side::Scattered
            } else {
                Side::Dense
            },
            left: if self.coord(self.rho(p)) < t {
                Side::Scattered
            } else {
                Side::Dense
            },
        }
    }

    /// Evaluation grid over `[a, b]`: every discrete point of the scale
    /// in range exactly, and every dense sub-segment sampled with
    /// `dense_samples` equally spaced interior points plus its
    /// endpoints. Strictly increasing.
    pub fn grid(
        &self,
        a: PointRef,
        b: PointRef,
        dense_samples: usize,
    ) -> Result<Vec<PointRef>, ScaleError> {
        let va = self.coord(a);
        let vb = self.coord(b);
        if va > vb {
            return Err(ScaleError::InvalidRange { a: va, b: vb });
        }
        let mut out: Vec<PointRef> = Vec::new();
        let mut last = f64::NEG_INFINITY;
        let mut push = |out: &mut Vec<PointRef>, p: PointRef, t: f64| {
            if t > last {
                out.push(p);
                last = t;
            }
        };
        for (ci, c) in self.components.iter().enumerate() {
            match c {
                Component::Points(ps) => {
                    for (i, &t) in ps.iter().enumerate() {
                        if va <= t && t <= vb {
                            push(
                                &mut out,
                                PointRef {
                                    component: ci,
                                    location: Location::Discrete(i),
                                },
                                t,
                            );
                        }
                    }
                }
                Component::Interval { lo, hi } => {
                    let u = lo.max(va);
                    let v = hi.min(vb);
                    if u > v {
                        continue;
                    }
                    let mk = |t: f64| PointRef {
                        component: ci,
                        location: Location::Interior(t),
                    };
                    push(&mut out, mk(u), u);
                    if u < v {
                        let step = (v - u) / (dense_samples as f64 + 1.0);
                        for k in 1..=dense_samples {
                            let t = u + step * k as f64;
                            if t < v {
                                push(&mut out, mk(t), t);
                            }
                        }
                        push(&mut out, mk(v), v);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Point refs of a purely discrete scale, ascending.
    pub fn discrete_refs(&self) -> Option<Vec<PointRef>> {
        if !self.is_discrete() {
            return None;
        }
        let mut out = Vec::new();
        for (ci, c) in self.components.iter().enumerate() {
            if let Component::Points(ps) = c {
                for i in 0..ps.len() {
                    out.push(PointRef {
                        component: ci,
                        location: Location::Discrete(i),
                    });
                }
            }
        }
        Some(out)
    }

    /// All coordinates of a purely discrete scale, ascending.
    pub fn discrete_coords(&self) -> Option<Vec<f64>> {
        if !self.is_discrete() {
            return None;
        }
        let mut out = Vec::new();
        for c in &self.components {
            if let Component::Points(ps) = c {
                out.extend_from_slice(ps);
            }
        }
        Some(out)
    }

    /// Bounds `(lo, hi)` of the interval component containing `p`, or
    /// `None` for a discrete point.
    pub fn interval_bounds(&self, p: PointRef) -> Option<(f64, f64)> {
        match &self.components[p.component] {
            Component::Interval { lo, hi } => Some((*lo, *hi)),
            Component::Points(_) => None,
        }
    }

    /// Parses the scale literal syntax:
    /// `interval(a,b)`, `points(p1,p2,...)`, `lattice(start,step,count)`,
    /// `qscale(q,start,count)`, joined by `+`.
    pub fn parse(src: &str) -> Result<TimeScale, ScaleError> {
        let mut raw = Vec::new();
        let mut depth = 0usize;
        let mut term_start = 0usize;
        let bytes = src.as_bytes();
        let mut terms: Vec<(usize, &str)> = Vec::new();
        for (i, &ch) in bytes.iter().enumerate() {
            match ch {
                b'(' => depth += 1,
                b')' => {
                    depth = depth.checked_sub(1).ok_or(ScaleError::Literal {
                        col: i + 1,
                        msg: "unbalanced ')'".into(),
                    })?
                }
                b'+' if depth == 0 => {
                    terms.push((term_start, &src[term_start..i]));
                    term_start = i + 1;
                }
                _ => {}
            }
        }
        if depth != 0 {
            return Err(ScaleError::Literal {
                col: src.len() + 1,
                msg: "missing ')'".into(),
            });
        }
        terms.push((term_start, &src[term_start..]));
        for (off, term) in terms {
            raw.push(parse_literal_term(term, off)?);
        }
        TimeScale::new(raw)
    }
}

fn parse_literal_term(term: &str, offset: usize) -> Result<RawComponent, ScaleError> {
    let err = |rel: usize, msg: &str| ScaleError::Literal {
        col: offset + rel + 1,
        msg: msg.to_string(),
    };
    let trimmed = term.trim();
    let lead = term.len() - term.trim_start().len();
    if trimmed.is_empty() {
        return Err(err(0, "expected a scale component"));
    }
    let open = trimmed
        .find('(')
        .ok_or_else(|| err(lead, "expected '(' after component name"))?;
    if !trimmed.ends_with(')') {
        return Err(err(lead + trimmed.len(), "expected ')'"));
    }
    let name = trimmed[..open].trim();
    let inner = &trimmed[open + 1..trimmed.len() - 1];
    let args: Vec<f64> = if inner.trim().is_empty() {
        Vec::new()
    } else {
        inner
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| err(lead, &format!("invalid number '{}'", s.trim())))
            })
            .collect::<Result<_, _>>()?
    };
    let arity = |n: usize| -> Result<(), ScaleError> {
        if args.len() == n {
            Ok(())
        } else {
            Err(err(lead, &format!("{name} expects {n} arguments")))
        }
    };
    match name {
        "interval" => {
            arity(2)?;
            Ok(RawComponent::Interval {
                lo: args[0],
                hi: args[1],
            })
        }
        "points" => {
            if args.is_empty() {
                return Err(err(lead, "points expects at least one coordinate"));
            }
            Ok(RawComponent::Points(args))
        }
        "lattice" => {
            arity(3)?;
            let (start, step, count) = (args[0], args[1], args[2]);
            if count < 1.0 || count.fract() != 0.0 {
                return Err(err(lead, "lattice count must be a positive integer"));
            }
            let pts = (0..count as usize)
                .map(|i| start + step * i as f64)
                .collect();
            Ok(RawComponent::Points(pts))
        }
        "qscale" => {
            arity(3)?;
            let (q, start, count) = (args[0], args[1], args[2]);
            if count < 1.0 || count.fract() != 0.0 {
                return Err(err(lead, "qscale count must be a positive integer"));
            }
            let mut pts = Vec::with_capacity(count as usize);
            let mut x = start;
            for _ in 0..count as usize {
                pts.push(x);
                x *= q;
            }
            Ok(RawComponent::Points(pts))
        }
        _ => Err(err(lead, &format!("unknown component '{name}'"))),
    }
}

impl fmt::Display for TimeScale {
    /// Canonical literal form; round-trips through [`TimeScale::parse`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                write!(f, "+")?;
            }
            match c {
                Component::Interval { lo, hi } => write!(f, "interval({lo},{hi})")?,
                Component::Points(ps) => {
                    write!(f, "points(")?;
                    for (j, p) in ps.iter().enumerate() {
                        if j > 0 {
                            write!(f, ",")?;
                        }
                        write!(f, "{p}")?;
                    }
                    write!(f, ")")?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scale(src: &str) -> TimeScale {
        TimeScale::parse(src).unwrap()
    }

    fn at(ts: &TimeScale, t: f64) -> PointRef {
        ts.locate(t).unwrap()
    }

    #[test]
    fn union_of_interval_and_points() {
        let ts = scale("interval(0,1)+points(2,3)");
        assert_eq!(ts.components().len(), 2);
        assert_eq!(ts.min(), 0.0);
        assert_eq!(ts.max(), 3.0);
    }

    #[test]
    fn points_are_sorted_and_deduped() {
        let ts = TimeScale::from_points(vec![3.0, 1.0, 2.0, 1.0]).unwrap();
        assert_eq!(ts.discrete_coords().unwrap(), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn touching_point_merges_into_interval() {
        // oracle: set union of the raw sets, re-canonicalized
        let ts = TimeScale::new(vec![
            RawComponent::Interval { lo: 0.0, hi: 1.0 },
            RawComponent::Points(vec![1.0, 2.0]),
        ])
        .unwrap();
        assert_eq!(ts.components().len(), 2);
        assert_eq!(
            ts.components()[0],
            Component::Interval { lo: 0.0, hi: 1.0 }
        );
        assert_eq!(ts.components()[1], Component::Points(vec![2.0]));
        // the point 1 belongs to the interval
        let p = at(&ts, 1.0);
        assert_eq!(p.component, 0);
    }

    #[test]
    fn overlapping_intervals_merge() {
        let ts = TimeScale::new(vec![
            RawComponent::Interval { lo: 0.0, hi: 2.0 },
            RawComponent::Interval { lo: 1.0, hi: 3.0 },
        ])
        .unwrap();
        assert_eq!(ts.components(), &[Component::Interval { lo: 0.0, hi: 3.0 }]);
    }

    #[test]
    fn empty_and_contradictory_specs_error() {
        assert_eq!(TimeScale::new(vec![]), Err(ScaleError::EmptyScale));
        assert_eq!(
            TimeScale::interval(2.0, 1.0),
            Err(ScaleError::InvalidInterval { lo: 2.0, hi: 1.0 })
        );
    }

    #[test]
    fn sigma_rho_on_mixed_scale() {
        let ts = scale("interval(0,1)+points(2,3)");
        assert_eq!(ts.coord(ts.sigma(at(&ts, 1.0))), 2.0);
        assert_eq!(ts.coord(ts.sigma(at(&ts, 0.5))), 0.5);
        assert_eq!(ts.coord(ts.sigma(at(&ts, 3.0))), 3.0);
        assert_eq!(ts.coord(ts.rho(at(&ts, 2.0))), 1.0);
        assert_eq!(ts.coord(ts.rho(at(&ts, 0.5))), 0.5);
    }

    #[test]
    fn rho_at_discrete_min() {
        let ts = TimeScale::from_points(vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(ts.coord(ts.rho(at(&ts, 1.0))), 1.0);
    }

    #[test]
    fn graininess_examples() {
        let ts = scale("lattice(0,1,6)");
        let p = at(&ts, 3.0);
        assert_eq!(ts.mu(p), 1.0);
        assert_eq!(ts.nu(p), 1.0);

        let ts = scale("interval(0,1)+points(2)");
        let p = at(&ts, 1.0);
        assert_eq!(ts.mu(p), 1.0);
        assert_eq!(ts.nu(p), 0.0);

        // q-scale: direct subtraction of neighbors
        let ts = scale("qscale(2,1,4)");
        assert_eq!(ts.discrete_coords().unwrap(), vec![1.0, 2.0, 4.0, 8.0]);
        let p = at(&ts, 2.0);
        assert_eq!(ts.mu(p), 2.0);
        assert_eq!(ts.nu(p), 1.0);
    }

    #[test]
    fn classify_examples() {
        let ts = scale("interval(0,1)+points(2)");
        let c = ts.classify(at(&ts, 1.0));
        assert_eq!(c.right, Side::Scattered);
        assert_eq!(c.left, Side::Dense);

        let ts = TimeScale::from_points(vec![1.0, 2.0, 3.0]).unwrap();
        let c = ts.classify(at(&ts, 2.0));
        assert_eq!((c.right, c.left), (Side::Scattered, Side::Scattered));

        let ts = TimeScale::interval(0.0, 1.0).unwrap();
        let c = ts.classify(at(&ts, 0.5));
        assert_eq!((c.right, c.left), (Side::Dense, Side::Dense));
    }

    #[test]
    fn grid_enumerates_discrete_points() {
        let ts = TimeScale::from_points(vec![0.0, 1.0, 2.0, 3.0]).unwrap();
        let g = ts.grid(ts.min_ref(), ts.max_ref(), 7).unwrap();
        let coords: Vec<f64> = g.iter().map(|&p| ts.coord(p)).collect();
        assert_eq!(coords, vec![0.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn grid_samples_intervals_evenly() {
        let ts = TimeScale::interval(0.0, 1.0).unwrap();
        let g = ts.grid(ts.min_ref(), ts.max_ref(), 3).unwrap();
        let coords: Vec<f64> = g.iter().map(|&p| ts.coord(p)).collect();
        assert_eq!(coords, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn grid_concatenates_per_component() {
        // oracle: concatenation of per-component grids
        let ts = scale("interval(0,1)+points(2)");
        let g = ts.grid(ts.min_ref(), ts.max_ref(), 1).unwrap();
        let coords: Vec<f64> = g.iter().map(|&p| ts.coord(p)).collect();
        assert_eq!(coords, vec![0.0, 0.5, 1.0, 2.0]);
    }

    #[test]
    fn grid_rejects_reversed_range() {
        let ts = scale("lattice(0,1,4)");
        let e = ts.grid(at(&ts, 3.0), at(&ts, 0.0), 0);
        assert_eq!(e, Err(ScaleError::InvalidRange { a: 3.0, b: 0.0 }));
    }

    #[test]
    fn locate_is_exact() {
        let ts = scale("points(0.1,0.2)");
        assert!(ts.locate(0.1).is_ok());
        assert!(ts.locate(0.15).is_err());
        assert!(ts.locate(0.1 + 1e-13).is_err());
    }

    #[test]
    fn display_round_trips() {
        for src in [
            "interval(0,1)+points(2,3)",
            "points(1,2,3)",
            "qscale(2,1,4)",
            "interval(-1.5,0)+interval(2,3.25)+points(5)",
        ] {
            let ts = scale(src);
            let again = TimeScale::parse(&ts.to_string()).unwrap();
            assert_eq!(ts, again);
        }
    }

    #[test]
    fn literal_errors_carry_columns() {
        match TimeScale::parse("interval(0,1)+nope(2)") {
            Err(ScaleError::Literal { col, .. }) => assert_eq!(col, 15),
            other => panic!("expected literal error, got {other:?}"),
        }
    }

    #[test]
    fn jump_invariants_on_random_scales() {
        // sigma >= id, rho <= id, rho(sigma) <= sigma; on purely discrete
        // scales rho(sigma(p)) == p below the max. Deterministic sweep.
        let mut state: u64 = 0x9E37_79B9_7F4A_7C15;
        let mut next = move || {
            state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
            z ^ (z >> 31)
        };
        for _ in 0..1000 {
            let n = 3 + (next() % 8) as usize;
            let mut pts: Vec<f64> = (0..n)
                .map(|_| (next() % 2000) as f64 / 100.0 - 10.0)
                .collect();
            let with_interval = next() % 2 == 0;
            let mut raw = vec![RawComponent::Points(std::mem::take(&mut pts))];
            if with_interval {
                let lo = (next() % 100) as f64 / 10.0 + 11.0;
                raw.push(RawComponent::Interval { lo, hi: lo + 1.0 });
            }
            let ts = match TimeScale::new(raw) {
                Ok(ts) => ts,
                Err(_) => continue,
            };
            let grid = ts.grid(ts.min_ref(), ts.max_ref(), 3).unwrap();
            let mut prev = f64::NEG_INFINITY;
            for &p in &grid {
                let t = ts.coord(p);
                assert!(t > prev, "grid must be strictly increasing");
                prev = t;
                let s = ts.sigma(p);
                let r = ts.rho(p);
                assert!(ts.coord(s) >= t);
                assert!(ts.coord(r) <= t);
                assert!(ts.coord(ts.rho(s)) <= ts.coord(s));
                // classify agrees with graininess signs
                let c = ts.classify(p);
                assert_eq!(c.right == Side::Scattered, ts.mu(p) > 0.0);
                assert_eq!(c.left == Side::Scattered, ts.nu(p) > 0.0);
                if ts.is_discrete() && ts.coord(p) < ts.max() {
                    assert_eq!(ts.rho(s), p);
                }
            }
        }
    }
}
