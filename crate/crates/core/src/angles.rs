//! External angles as exact rationals modulo one, the doubling map, and
//! periodic orbit portraits.
//!
//! Nothing in this module touches floating point except [`Angle::to_f64`],
//! which exists for the numerical layers built on top of it.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AngleError {
    #[error("denominator must be positive")]
    ZeroDenominator,
    #[error("cannot parse angle `{0}`")]
    Parse(String),
    #[error("period must be at least 1")]
    ZeroPeriod,
}

/// A point of the circle `R/Z`, stored as a reduced fraction in `[0, 1)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Angle(BigRational);

impl Angle {
    pub fn zero() -> Self {
        Angle(BigRational::zero())
    }

    /// Builds `numerator / denominator` reduced modulo one.
    pub fn new(numerator: impl Into<BigInt>, denominator: impl Into<BigInt>) -> Result<Self, AngleError> {
        let den: BigInt = denominator.into();
        if den.is_zero() {
            return Err(AngleError::ZeroDenominator);
        }
        Ok(Self::from_ratio(BigRational::new(numerator.into(), den)))
    }

    /// Reduces an arbitrary rational modulo one.
    pub fn from_ratio(r: BigRational) -> Self {
        let fl = r.floor();
        Angle(r - fl)
    }

    pub fn ratio(&self) -> &BigRational {
        &self.0
    }

    pub fn numerator(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denominator(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(0.0)
    }

    /// `2a mod 1`.
    pub fn double(&self) -> Angle {
        Self::from_ratio(&self.0 * BigInt::from(2))
    }

    /// `2^k a mod 1`.
    pub fn double_n(&self, k: u32) -> Angle {
        let (n, d) = (self.0.numer(), self.0.denom());
        let shifted = (n << k as usize).mod_floor(d);
        Angle(BigRational::new(shifted, d.clone()))
    }

    /// The two preimages `a/2` and `(a+1)/2` under doubling, in that order.
    pub fn halves(&self) -> (Angle, Angle) {
        let two = BigInt::from(2);
        let h = &self.0 / &two;
        let h2 = (&self.0 + BigRational::one()) / two;
        (Angle(h), Angle(h2))
    }

    /// `a + 1/2 mod 1`, the angle of the ray landing at `-z` when the ray
    /// of angle `a` lands at `z`.
    pub fn antipode(&self) -> Angle {
        Self::from_ratio(&self.0 + BigRational::new(BigInt::one(), BigInt::from(2)))
    }

    pub fn add(&self, other: &BigRational) -> Angle {
        Self::from_ratio(&self.0 + other)
    }

    /// Preperiod, period and full forward orbit under doubling.
    pub fn orbit(&self) -> Orbit {
        let mut seen: HashMap<Angle, usize> = HashMap::new();
        let mut points = Vec::new();
        let mut cur = self.clone();
        loop {
            if let Some(&first) = seen.get(&cur) {
                return Orbit { preperiod: first, period: points.len() - first, points };
            }
            seen.insert(cur.clone(), points.len());
            let next = cur.double();
            points.push(cur);
            cur = next;
        }
    }

    /// Exact period when the angle is periodic (odd denominator).
    pub fn period(&self) -> Option<usize> {
        if self.denominator().is_even() {
            return None;
        }
        Some(self.orbit().period)
    }

    pub fn is_periodic(&self) -> bool {
        self.denominator().is_odd()
    }

    /// Length of the counterclockwise arc from `self` to `other`, in `[0, 1)`.
    pub fn ccw_distance(&self, other: &Angle) -> BigRational {
        let d = &other.0 - &self.0;
        if d.is_negative() {
            d + BigRational::one()
        } else {
            d
        }
    }

    /// Whether `self` lies in the open counterclockwise arc from `start` to
    /// `end`. When `start == end` the arc is the full circle minus that point.
    pub fn in_open_arc(&self, start: &Angle, end: &Angle) -> bool {
        if self == start || self == end {
            return false;
        }
        if start == end {
            return true;
        }
        start.ccw_distance(self) < start.ccw_distance(end)
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_zero() {
            write!(f, "0")
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Angle {
    type Err = AngleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || AngleError::Parse(s.to_string());
        match s.split_once('/') {
            Some((n, d)) => {
                let n: BigInt = n.trim().parse().map_err(|_| bad())?;
                let d: BigInt = d.trim().parse().map_err(|_| bad())?;
                if !d.is_positive() {
                    return Err(bad());
                }
                Angle::new(n, d)
            }
            None => {
                let n: BigInt = s.parse().map_err(|_| bad())?;
                Angle::new(n, 1)
            }
        }
    }
}

impl Serialize for Angle {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orbit {
    pub preperiod: usize,
    pub period: usize,
    /// `preperiod + period` distinct points starting at the angle itself.
    pub points: Vec<Angle>,
}

/// All `k/(2^n - 1)`, `k = 0..2^n - 1`, sorted. These are exactly the
/// angles fixed by the `n`-th iterate of doubling.
pub fn periodic_angles(n: u32) -> Result<Vec<Angle>, AngleError> {
    if n == 0 {
        return Err(AngleError::ZeroPeriod);
    }
    let den = (BigInt::one() << n as usize) - BigInt::one();
    let count = den.to_u64().unwrap_or(u64::MAX);
    Ok((0..count).map(|k| Angle(BigRational::new(BigInt::from(k), den.clone()))).collect())
}

/// Angles of exact period `n`.
pub fn angles_of_exact_period(n: u32) -> Result<Vec<Angle>, AngleError> {
    Ok(periodic_angles(n)?
        .into_iter()
        .filter(|a| a.period() == Some(n as usize))
        .collect())
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PortraitError {
    #[error("portrait has no classes")]
    Empty,
    #[error("class {0} is empty")]
    EmptyClass(usize),
    #[error("angle {0} appears more than once")]
    DuplicateAngle(String),
    #[error("angle {0} is not periodic under doubling")]
    NotPeriodic(String),
    #[error("class {class} has {found} angles, expected {expected}")]
    UnequalValence { class: usize, expected: usize, found: usize },
    #[error("doubling class {class} does not give a class (angle {angle} maps to {image})")]
    NotDoublingInvariant { class: usize, angle: String, image: String },
    #[error("doubling permutes the classes in more than one cycle")]
    NotSingleCycle,
    #[error("classes {first} and {second} are linked")]
    UnlinkedViolation { first: usize, second: usize },
    #[error("doubling does not preserve the cyclic order of class {0}")]
    CyclicOrderViolation(usize),
    #[error("a dividing portrait needs at least two rays per point (valence {0})")]
    NonDividing(usize),
    #[error("characteristic arc is not unique")]
    AmbiguousCharacteristicArc,
}

/// A validated periodic ray portrait.
///
/// `classes[j + 1] = 2 * classes[j]` (indices mod `t`), and `classes[1 % t]`
/// is the class bounding the characteristic arc, so `classes[0]` holds the
/// rays at the cycle point whose image is the vertex of the critical-value
/// piece. Each class is sorted ascending.
#[derive(Clone, PartialEq, Eq)]
pub struct OrbitPortrait {
    classes: Vec<Vec<Angle>>,
    period_t: usize,
    valence_s: usize,
    ray_count_r: usize,
    characteristic_arc: (Angle, Angle),
    ray_period: usize,
}

impl fmt::Debug for OrbitPortrait {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OrbitPortrait")
            .field("classes", &self.classes)
            .field("t", &self.period_t)
            .field("s", &self.valence_s)
            .field("char_arc", &self.characteristic_arc)
            .finish()
    }
}

impl OrbitPortrait {
    pub fn classes(&self) -> &[Vec<Angle>] {
        &self.classes
    }
    pub fn period_t(&self) -> usize {
        self.period_t
    }
    pub fn valence_s(&self) -> usize {
        self.valence_s
    }
    pub fn ray_count_r(&self) -> usize {
        self.ray_count_r
    }
    /// Common period of the angles under doubling.
    pub fn ray_period(&self) -> usize {
        self.ray_period
    }
    pub fn characteristic_arc(&self) -> (Angle, Angle) {
        self.characteristic_arc.clone()
    }
    pub fn angles(&self) -> Vec<Angle> {
        let mut all: Vec<Angle> = self.classes.iter().flatten().cloned().collect();
        all.sort();
        all
    }
    pub fn class_of(&self, a: &Angle) -> Option<usize> {
        self.classes.iter().position(|c| c.binary_search(a).is_ok())
    }
    /// Portrait obtained by negating every landing point (`a -> a + 1/2`).
    pub fn antipodal_classes(&self) -> Vec<Vec<Angle>> {
        self.classes
            .iter()
            .map(|c| {
                let mut v: Vec<Angle> = c.iter().map(Angle::antipode).collect();
                v.sort();
                v
            })
            .collect()
    }
}

impl Serialize for OrbitPortrait {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        PortraitJson {
            classes: self.classes.clone(),
            t: self.period_t,
            s: self.valence_s,
            r: self.ray_count_r,
            char_arc: [self.characteristic_arc.0.clone(), self.characteristic_arc.1.clone()],
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for OrbitPortrait {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = PortraitJson::deserialize(deserializer)?;
        validate_portrait(&raw.classes).map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct PortraitJson {
    classes: Vec<Vec<Angle>>,
    t: usize,
    s: usize,
    r: usize,
    char_arc: [Angle; 2],
}

/// Index of the complementary arc of the sorted set `sorted` containing `x`
/// (`x` not in the set). Arc `i` runs from `sorted[i]` to `sorted[i + 1]`;
/// the last arc wraps through zero.
pub fn complementary_arc_index(sorted: &[Angle], x: &Angle) -> usize {
    match sorted.binary_search(x) {
        Ok(i) => i,
        Err(0) => sorted.len() - 1,
        Err(i) => i - 1,
    }
}

/// Checks the admissibility conditions and seals an [`OrbitPortrait`].
///
/// A collection of classes is admissible when: every angle is periodic and
/// appears once, all classes have the same size `s >= 2`, doubling maps
/// every class bijectively onto a class and permutes the classes in a single
/// cycle, doubling preserves cyclic order inside each class, and no two
/// classes are linked on the circle.
pub fn validate_portrait(classes: &[Vec<Angle>]) -> Result<OrbitPortrait, PortraitError> {
    if classes.is_empty() {
        return Err(PortraitError::Empty);
    }
    let mut sorted: Vec<Vec<Angle>> = Vec::with_capacity(classes.len());
    let mut owner: HashMap<Angle, usize> = HashMap::new();
    for (i, c) in classes.iter().enumerate() {
        if c.is_empty() {
            return Err(PortraitError::EmptyClass(i));
        }
        let mut v = c.clone();
        v.sort();
        for a in &v {
            if owner.insert(a.clone(), i).is_some() {
                return Err(PortraitError::DuplicateAngle(a.to_string()));
            }
            if !a.is_periodic() {
                return Err(PortraitError::NotPeriodic(a.to_string()));
            }
        }
        sorted.push(v);
    }
    let s = sorted[0].len();
    for (i, c) in sorted.iter().enumerate() {
        if c.len() != s {
            return Err(PortraitError::UnequalValence { class: i, expected: s, found: c.len() });
        }
    }

    // Doubling must send each class exactly onto some class.
    let mut image_of = vec![0usize; sorted.len()];
    for (i, c) in sorted.iter().enumerate() {
        let first = c[0].double();
        let target = owner.get(&first).copied().ok_or_else(|| PortraitError::NotDoublingInvariant {
            class: i,
            angle: c[0].to_string(),
            image: first.to_string(),
        })?;
        for a in c {
            let d = a.double();
            if owner.get(&d) != Some(&target) {
                return Err(PortraitError::NotDoublingInvariant {
                    class: i,
                    angle: a.to_string(),
                    image: d.to_string(),
                });
            }
        }
        image_of[i] = target;
    }
    let t = sorted.len();
    let mut cur = 0usize;
    for step in 1..=t {
        cur = image_of[cur];
        if cur == 0 && step < t {
            return Err(PortraitError::NotSingleCycle);
        }
    }
    if cur != 0 {
        return Err(PortraitError::NotSingleCycle);
    }

    for i in 0..t {
        for j in (i + 1)..t {
            let arc = complementary_arc_index(&sorted[i], &sorted[j][0]);
            if sorted[j].iter().any(|b| complementary_arc_index(&sorted[i], b) != arc) {
                return Err(PortraitError::UnlinkedViolation { first: i, second: j });
            }
        }
    }

    for (i, c) in sorted.iter().enumerate() {
        let img = &sorted[image_of[i]];
        let k = img.binary_search(&c[0].double()).expect("image checked above");
        for (j, a) in c.iter().enumerate() {
            if img[(k + j) % s] != a.double() {
                return Err(PortraitError::CyclicOrderViolation(i));
            }
        }
    }

    if s < 2 {
        return Err(PortraitError::NonDividing(s));
    }

    let (char_class, arc) = shortest_class_arc(&sorted)?;
    // Reorder so that classes[0] doubles onto the characteristic class.
    let pre = (0..t).find(|&i| image_of[i] == char_class).expect("single cycle");
    let mut ordered = Vec::with_capacity(t);
    let mut idx = pre;
    for _ in 0..t {
        ordered.push(sorted[idx].clone());
        idx = image_of[idx];
    }
    let ray_period = sorted[0][0].period().expect("periodic");
    Ok(OrbitPortrait {
        classes: ordered,
        period_t: t,
        valence_s: s,
        ray_count_r: t * s,
        characteristic_arc: arc,
        ray_period,
    })
}

fn shortest_class_arc(sorted: &[Vec<Angle>]) -> Result<(usize, (Angle, Angle)), PortraitError> {
    let mut best: Option<(BigRational, usize, (Angle, Angle))> = None;
    let mut tie = false;
    for (ci, c) in sorted.iter().enumerate() {
        for j in 0..c.len() {
            let a = &c[j];
            let b = &c[(j + 1) % c.len()];
            let len = a.ccw_distance(b);
            match &best {
                Some((l, _, _)) if &len > l => {}
                Some((l, _, _)) if &len == l => tie = true,
                _ => {
                    tie = false;
                    best = Some((len, ci, (a.clone(), b.clone())));
                }
            }
        }
    }
    if tie {
        return Err(PortraitError::AmbiguousCharacteristicArc);
    }
    let (_, ci, arc) = best.ok_or(PortraitError::Empty)?;
    Ok((ci, arc))
}

/// The two angles bounding the critical-value piece of depth zero.
pub fn characteristic_arc(p: &OrbitPortrait) -> (Angle, Angle) {
    p.characteristic_arc()
}
