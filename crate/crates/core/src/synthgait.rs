//! Deterministic synthetic walkers.
//!
//! A frontal-view body built from primitives (head disc, torso trapezoid, arm
//! and leg capsules, small near bumps for hands and knees) is rendered as a
//! depth map per frame. Lateral limb swing is mirrored about the body axis, so
//! a symmetric walker is mirror-symmetric in every frame; limb depth swings in
//! anti-phase, and a twice-per-stride bob, leg flex and shoulder roll are shared
//! by both sides. `limp_asym` weakens the swing of the right-hand limbs and
//! tilts the upper body towards the sound side once per stride; `sole_pad_px`
//! shortens the left leg as if the right sole were padded.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{GaitError, Result};
use crate::frames::{
    DepthFrame, DepthSequence, Intrinsics, Label, SequenceMeta, MAX_FOREGROUND_MM, MIN_FOREGROUND_MM,
    MIN_FRAME_SIDE,
};

#[derive(Debug, Clone, PartialEq)]
pub struct SynthParams {
    pub frames: usize,
    pub fps: f64,
    pub width: usize,
    pub height: usize,
    /// Leg-swing frequency in Hz.
    pub stride_hz: f64,
    /// Lateral foot swing amplitude in pixels.
    pub swing_amp: f64,
    /// 0 = symmetric, 1 = right limbs frozen and maximal lean.
    pub limp_asym: f64,
    /// Extra length of the right leg in pixels.
    pub sole_pad_px: f64,
    /// Torso depth in mm.
    pub depth_base: f64,
    /// Standard deviation of per-pixel depth jitter in mm.
    pub noise_mm: f64,
    pub seed: u64,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            frames: 120,
            fps: 13.0,
            width: 212,
            height: 256,
            stride_hz: 0.9,
            swing_amp: 3.0,
            limp_asym: 0.0,
            sole_pad_px: 0.0,
            depth_base: 2500.0,
            noise_mm: 4.0,
            seed: 0,
        }
    }
}

impl SynthParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(GaitError::InvalidParams(msg));
        if self.frames < 1 {
            return bad("frames must be at least 1".into());
        }
        if !(self.fps.is_finite() && self.fps > 0.0) {
            return bad(format!("fps must be positive, got {}", self.fps));
        }
        if !(0.0..=1.0).contains(&self.limp_asym) {
            return bad(format!("limp_asym must lie in [0, 1], got {}", self.limp_asym));
        }
        if self.width < 64.max(MIN_FRAME_SIDE) || self.height < 96 {
            return bad(format!(
                "frame {}x{} is too small for the body model (min 64x96)",
                self.width, self.height
            ));
        }
        if !(self.stride_hz.is_finite() && self.stride_hz > 0.0) {
            return bad(format!("stride_hz must be positive, got {}", self.stride_hz));
        }
        for (name, v) in [
            ("swing_amp", self.swing_amp),
            ("sole_pad_px", self.sole_pad_px),
            ("noise_mm", self.noise_mm),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return bad(format!("{name} must be non-negative, got {v}"));
            }
        }
        if !(self.depth_base >= 600.0 && self.depth_base <= 9000.0) {
            return bad(format!(
                "depth_base must lie in [600, 9000] mm, got {}",
                self.depth_base
            ));
        }
        Ok(())
    }

    /// Frames per stride, rounded.
    pub fn period_frames(&self) -> usize {
        (self.fps / self.stride_hz).round() as usize
    }
}

/// A depth-rendering primitive in (row, u) coordinates, where u is the column
/// offset from the body axis.
#[derive(Debug, Clone, Copy)]
enum Shape {
    /// Spherical cap: depth = near + bulge·(1 − sqrt(1 − ρ²)) relative to the
    /// rim at `near + bulge`.
    Disc {
        row: f64,
        u: f64,
        radius: f64,
        rim_mm: f64,
        bulge_mm: f64,
    },
    Capsule {
        a: (f64, f64),
        b: (f64, f64),
        radius: f64,
        rim_mm: f64,
        bulge_mm: f64,
    },
    /// Vertical trapezoid with a cylindrical depth profile across its width.
    Trapezoid {
        top: f64,
        bottom: f64,
        top_half: f64,
        bottom_half: f64,
        u: f64,
        rim_mm: f64,
        bulge_mm: f64,
    },
}

impl Shape {
    fn bbox(&self) -> (f64, f64, f64, f64) {
        match *self {
            Shape::Disc { row, u, radius, .. } => (row - radius, row + radius, u - radius, u + radius),
            Shape::Capsule { a, b, radius, .. } => (
                a.0.min(b.0) - radius,
                a.0.max(b.0) + radius,
                a.1.min(b.1) - radius,
                a.1.max(b.1) + radius,
            ),
            Shape::Trapezoid {
                top,
                bottom,
                top_half,
                bottom_half,
                u,
                ..
            } => {
                let h = top_half.max(bottom_half);
                (top, bottom, u - h, u + h)
            }
        }
    }

    /// Depth at (row, u) or `None` outside the shape.
    fn depth_at(&self, row: f64, u: f64) -> Option<f64> {
        let (rho2, rim, bulge) = match *self {
            Shape::Disc {
                row: r0,
                u: u0,
                radius,
                rim_mm,
                bulge_mm,
            } => {
                let (dr, du) = (row - r0, u - u0);
                ((dr * dr + du * du) / (radius * radius), rim_mm, bulge_mm)
            }
            Shape::Capsule {
                a,
                b,
                radius,
                rim_mm,
                bulge_mm,
            } => {
                let (vr, vu) = (b.0 - a.0, b.1 - a.1);
                let (wr, wu) = (row - a.0, u - a.1);
                let len2 = vr * vr + vu * vu;
                let t = if len2 > 0.0 {
                    ((wr * vr + wu * vu) / len2).clamp(0.0, 1.0)
                } else {
                    0.0
                };
                let (dr, du) = (wr - t * vr, wu - t * vu);
                ((dr * dr + du * du) / (radius * radius), rim_mm, bulge_mm)
            }
            Shape::Trapezoid {
                top,
                bottom,
                top_half,
                bottom_half,
                u: u0,
                rim_mm,
                bulge_mm,
            } => {
                if row < top || row > bottom {
                    return None;
                }
                let f = (row - top) / (bottom - top);
                let half = top_half + f * (bottom_half - top_half);
                let du = (u - u0) / half;
                (du * du, rim_mm, bulge_mm)
            }
        };
        if rho2 > 1.0 {
            None
        } else {
            Some(rim - bulge * (1.0 - rho2).sqrt())
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Body {
    scale: f64,
    axis: f64,
    ground: f64,
}

struct Pose {
    /// Head, neck, torso and arms, drawn in the untilted body frame.
    upper: Vec<Shape>,
    /// Legs, drawn directly in image coordinates.
    lower: Vec<Shape>,
    /// Upper-body tilt in radians about `pivot`, positive towards +u.
    tilt: f64,
    pivot: (f64, f64),
    /// Head center in image coordinates.
    head: (f64, f64),
}

impl Pose {
    fn to_image(&self, p: (f64, f64)) -> (f64, f64) {
        if self.tilt == 0.0 {
            return p;
        }
        let (sin, cos) = self.tilt.sin_cos();
        let (dr, du) = (p.0 - self.pivot.0, p.1 - self.pivot.1);
        (self.pivot.0 + cos * dr + sin * du, self.pivot.1 - sin * dr + cos * du)
    }

    fn to_body(&self, p: (f64, f64)) -> (f64, f64) {
        if self.tilt == 0.0 {
            return p;
        }
        let (sin, cos) = self.tilt.sin_cos();
        let (dr, du) = (p.0 - self.pivot.0, p.1 - self.pivot.1);
        (self.pivot.0 + cos * dr - sin * du, self.pivot.1 + sin * dr + cos * du)
    }
}

const ARM_SWING_RAD: f64 = 0.6;
const MAX_TILT_RAD: f64 = 0.15;
const LEG_FLEX: f64 = 0.25;
const SHOULDER_ROLL: f64 = 0.1;

fn pose(p: &SynthParams, body: &Body, phase: f64) -> Pose {
    let s = body.scale;
    let a = p.limp_asym;
    let sin = phase.sin();
    let base = p.depth_base;

    let bob = 4.0 * s * (2.0 * phase).cos();
    let head = (40.0 * s + bob, 0.0);
    let shoulder_row = 66.0 * s + bob;
    let hip_row = 150.0 * s + bob;
    let arm_len = 72.0 * s;
    let knee_frac = 0.45;

    let mut pose = Pose {
        upper: Vec::with_capacity(7),
        lower: Vec::with_capacity(4),
        tilt: a * MAX_TILT_RAD * sin,
        pivot: (hip_row, 0.0),
        head,
    };
    pose.head = pose.to_image(head);

    pose.upper.push(Shape::Disc {
        row: head.0,
        u: head.1,
        radius: 15.0 * s,
        rim_mm: base + 40.0,
        bulge_mm: 90.0,
    });
    pose.upper.push(Shape::Capsule {
        a: (head.0 + 10.0 * s, 0.0),
        b: (shoulder_row, 0.0),
        radius: 7.0 * s,
        rim_mm: base + 40.0,
        bulge_mm: 40.0,
    });
    let torso = Shape::Trapezoid {
        top: 60.0 * s + bob,
        bottom: hip_row + 6.0 * s,
        top_half: 34.0 * s * (1.0 + SHOULDER_ROLL * (2.0 * phase).cos()),
        bottom_half: 26.0 * s,
        u: 0.0,
        rim_mm: base + 60.0,
        bulge_mm: 100.0,
    };
    pose.upper.push(torso);
    pose.upper.push(bump((head.0 + 3.0 * s, 0.0), base - 50.0, 45.0));
    for k in 1..=3 {
        let at = (shoulder_row + 20.0 * k as f64 * s, 0.0);
        pose.upper.push(bump(at, surface(&torso, at), 45.0));
    }
    for side in [-1.0, 1.0] {
        let at = (hip_row - 12.0 * s, side * 14.0 * s);
        pose.upper.push(bump(at, surface(&torso, at), 45.0));
    }

    // the right-hand side is the impaired one
    for (side, damp) in [(-1.0, 1.0), (1.0, 1.0 - a)] {
        let swing = damp * p.swing_amp * sin;
        // forward/backward limb swing: depth in anti-phase across sides,
        // foreshortening of the arm identical for either direction
        let depth_phase = -side * damp * sin;
        let arm_angle = ARM_SWING_RAD * sin;

        let shoulder = (shoulder_row, side * 36.0 * s);
        let hand = (
            shoulder_row + arm_len * arm_angle.cos(),
            side * (42.0 * s + 0.8 * swing),
        );
        let arm_depth = base - 20.0 - 120.0 * depth_phase;
        pose.upper.push(bump(lerp(shoulder, hand, 0.5), arm_depth, 45.0));
        pose.upper.push(Shape::Capsule {
            a: shoulder,
            b: hand,
            radius: 6.5 * s,
            rim_mm: arm_depth + 40.0,
            bulge_mm: 40.0,
        });
        pose.upper.push(bump((hand.0 - 4.0 * s, hand.1), arm_depth, 48.0 + 22.0 * depth_phase));

        let hip = pose.to_image((hip_row, side * 13.0 * s));
        let pad = if side < 0.0 { p.sole_pad_px } else { 0.0 };
        let foot = (body.ground - pad, side * (17.0 * s + swing));
        let leg_depth = base - 30.0 + 120.0 * depth_phase;
        for t in [0.7, 0.88] {
            pose.lower.push(bump(lerp(hip, foot, t), leg_depth, 50.0));
        }
        pose.lower.push(Shape::Capsule {
            a: hip,
            b: foot,
            radius: 9.0 * s * (1.0 + LEG_FLEX * (2.0 * phase).cos()),
            rim_mm: leg_depth + 50.0,
            bulge_mm: 50.0,
        });
        pose.lower.push(bump(lerp(hip, foot, knee_frac), leg_depth, 55.0));
    }
    pose
}

/// Small nearer disc on a surface of depth `surface_mm`: a point of interest.
fn bump(at: (f64, f64), surface_mm: f64, height_mm: f64) -> Shape {
    Shape::Disc {
        row: at.0,
        u: at.1,
        radius: 2.2,
        rim_mm: surface_mm,
        bulge_mm: height_mm,
    }
}

fn surface(shape: &Shape, at: (f64, f64)) -> f64 {
    shape.depth_at(at.0, at.1).expect("bump lies on its surface")
}

fn lerp(a: (f64, f64), b: (f64, f64), t: f64) -> (f64, f64) {
    (a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1))
}

fn render(p: &SynthParams, body: &Body, pose: &Pose) -> Vec<f64> {
    let (w, h) = (p.width, p.height);
    let mut depth = vec![f64::INFINITY; w * h];
    let tilted = pose.upper.iter().map(|s| (s, true));
    let straight = pose.lower.iter().map(|s| (s, false));
    for (shape, in_body_frame) in tilted.chain(straight) {
        let (r0, r1, u0, u1) = shape.bbox();
        let (r0, r1, u0, u1) = if in_body_frame && pose.tilt != 0.0 {
            let corners = [(r0, u0), (r0, u1), (r1, u0), (r1, u1)].map(|c| pose.to_image(c));
            let fold = |f: fn(f64, f64) -> f64, pick: fn(&(f64, f64)) -> f64, init: f64| {
                corners.iter().map(pick).fold(init, f)
            };
            (
                fold(f64::min, |c| c.0, f64::INFINITY),
                fold(f64::max, |c| c.0, f64::NEG_INFINITY),
                fold(f64::min, |c| c.1, f64::INFINITY),
                fold(f64::max, |c| c.1, f64::NEG_INFINITY),
            )
        } else {
            (r0, r1, u0, u1)
        };
        let rows = (r0.floor().max(0.0) as usize)..=(r1.ceil().min((h - 1) as f64) as usize);
        let c_lo = (u0 + body.axis).floor().max(0.0) as usize;
        let c_hi = (u1 + body.axis).ceil().min((w - 1) as f64) as usize;
        for r in rows {
            for c in c_lo..=c_hi {
                let mut at = (r as f64, c as f64 - body.axis);
                if in_body_frame {
                    at = pose.to_body(at);
                }
                if let Some(d) = shape.depth_at(at.0, at.1) {
                    let slot = &mut depth[r * w + c];
                    if d < *slot {
                        *slot = d;
                    }
                }
            }
        }
    }
    depth
}

/// Renders a synthetic walking sequence. Identical parameters give identical
/// output.
pub fn generate_walk(params: &SynthParams) -> Result<DepthSequence> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let phase0 = rng.random_range(0.0..2.0 * PI);
    let build = 1.0 + rng.random_range(-0.04..0.04);
    let noise = if params.noise_mm > 0.0 {
        Some(Normal::new(0.0, params.noise_mm).expect("finite noise"))
    } else {
        None
    };

    let scale = params.height as f64 / 256.0;
    let body = Body {
        scale: scale * build,
        // mirror axis between two pixel columns: c <-> width - 1 - c
        axis: (params.width as f64 - 1.0) / 2.0,
        ground: params.height as f64 - 12.0 * scale,
    };
    let intrinsics = Intrinsics {
        fx: 365.0 * scale,
        fy: 365.0 * scale,
        cx: params.width as f64 / 2.0,
        cy: params.height as f64 / 2.0,
    };

    let mut frames = Vec::with_capacity(params.frames);
    let mut head_px = Vec::with_capacity(params.frames);
    let mut ground_row = Vec::with_capacity(params.frames);
    for t in 0..params.frames {
        let phase = phase0 + 2.0 * PI * params.stride_hz * t as f64 / params.fps;
        let pose = pose(params, &body, phase);
        let depth = render(params, &body, &pose);
        let mut frame = DepthFrame::new(params.width, params.height, t);
        for (out, d) in frame.depth.iter_mut().zip(depth) {
            if d.is_finite() {
                let jitter = noise.as_ref().map_or(0.0, |n| n.sample(&mut rng));
                *out = (d + jitter)
                    .round()
                    .clamp(f64::from(MIN_FOREGROUND_MM), f64::from(MAX_FOREGROUND_MM)) as u16;
            }
        }
        frames.push(frame);
        head_px.push((
            pose.head.0.round() as i64,
            (pose.head.1 + body.axis).floor() as i64,
        ));
        ground_row.push(body.ground.round() as i64);
    }

    Ok(DepthSequence {
        frames,
        meta: SequenceMeta {
            head_px,
            ground_row,
            intrinsics,
            fps: params.fps,
        },
        label: Some(if params.limp_asym > 0.0 || params.sole_pad_px > 0.0 {
            Label::Abnormal
        } else {
            Label::Normal
        }),
    })
}
