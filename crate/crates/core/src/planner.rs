//! Recursive walk planner.
//!
//! From the request the planner derives the gait models and the initial
//! phase, then schedules one support exchange per step on the saddle via
//! points. Each exchange gets a landing target, an ankle event and a swing;
//! the walk is then sampled on a fixed time grid.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{Point2, Point3};

use crate::ankle::{self, AnkleEvent, ANKLE_TAU};
use crate::bos::BosRegion;
use crate::com::{self, line_slope, ComTrajectory, GaitPhase, ViaPointSet};
use crate::energy::{self, EnergyBudget, EnergyState};
use crate::error::{GaitError, Result};
use crate::foot::{self, swing_target, FeetState, DEFAULT_SWING_CLEARANCE};
use crate::params::{
    speed_models, AnthroProfile, SpeedModels, DEFAULT_PIVOT_DISTANCE, DEFAULT_REACH_COEFF,
};
use crate::stability::{ml_stability, step_stability};
use crate::Side;

pub const DEFAULT_DT: f64 = 0.080;
/// Upper end of the accepted heel-strike amplitude, rad.
pub const MAX_HS_ANGLE: f64 = 30.0 * PI / 180.0;
/// Highest speed the planner accepts, m/s.
pub const MAX_SPEED: f64 = 3.0;
/// Feet closer than this along the walking direction count as abreast, m.
pub const ABREAST_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct GaitRequest {
    pub v_des: f64,
    /// Heel-strike amplitude, rad.
    pub max_theta_hs: f64,
    pub n_steps: usize,
    pub body_height: f64,
    pub mass: f64,
    pub dt: f64,
    /// Initial `(left, right)` CoPs; abreast at the model step width when unset.
    pub initial_feet: Option<(Point2<f64>, Point2<f64>)>,
    /// Support leg when the feet start abreast.
    pub first_support: Side,
    pub swing_clearance: f64,
    /// Active work budget, J; `0.5 J/kg` of body mass when unset.
    pub w_budget: Option<f64>,
    /// Work available per trajectory segment, J; equals the budget when unset.
    pub w_c: Option<f64>,
    pub pivot_distance: f64,
    pub reach_coeff: f64,
    /// Ignore the ankle strategies and keep every leg at the rigid length.
    pub rigid_pendulum: bool,
}

impl GaitRequest {
    pub fn new(v_des: f64, max_theta_hs: f64, n_steps: usize, body_height: f64, mass: f64) -> Self {
        Self {
            v_des,
            max_theta_hs,
            n_steps,
            body_height,
            mass,
            dt: DEFAULT_DT,
            initial_feet: None,
            first_support: Side::Left,
            swing_clearance: DEFAULT_SWING_CLEARANCE,
            w_budget: None,
            w_c: None,
            pivot_distance: DEFAULT_PIVOT_DISTANCE,
            reach_coeff: DEFAULT_REACH_COEFF,
            rigid_pendulum: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(GaitError::InvalidInput(msg));
        if !(self.v_des > 0.0 && self.v_des < MAX_SPEED) {
            return bad(format!(
                "v_des must lie in (0, {MAX_SPEED}) m/s, got {}",
                self.v_des
            ));
        }
        if !(self.max_theta_hs > 0.0 && self.max_theta_hs <= MAX_HS_ANGLE) {
            return bad(format!(
                "heel-strike angle must lie in (0, 30] deg, got {} deg",
                self.max_theta_hs.to_degrees()
            ));
        }
        if self.n_steps == 0 {
            return bad("n_steps must be at least 1".into());
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.swing_clearance >= 0.0 && self.swing_clearance.is_finite()) {
            return bad(format!(
                "swing clearance must be non-negative, got {}",
                self.swing_clearance
            ));
        }
        for (name, w) in [("w_budget", self.w_budget), ("w_c", self.w_c)] {
            if let Some(w) = w {
                if !(w >= 0.0 && w.is_finite()) {
                    return bad(format!("{name} must be non-negative, got {w}"));
                }
            }
        }
        Ok(())
    }

    pub fn profile(&self) -> Result<AnthroProfile> {
        AnthroProfile::new(self.body_height, self.mass)?
            .with_pivot_distance(self.pivot_distance)?
            .with_reach_coeff(self.reach_coeff)
    }

    pub fn budget(&self, profile: &AnthroProfile) -> EnergyBudget {
        let mut b = EnergyBudget::for_walk(profile, self.v_des);
        if let Some(w) = self.w_budget {
            b.w = w;
            b.w_c = w;
        }
        if let Some(w_c) = self.w_c {
            b.w_c = w_c;
        }
        b
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialState {
    /// Gait phase at t = 0.
    pub phase0: f64,
    pub natural_frequency: f64,
    pub models: SpeedModels,
    pub profile: AnthroProfile,
    pub feet: FeetState,
    pub trajectory: ComTrajectory,
}

/// Initial phase, models and CoM anchoring from the initial feet.
///
/// Abreast feet start on the support foot's lateral apex (phase 0 for left
/// support, π for right). Staggered feet start on the saddle between them,
/// supported by the leading foot.
pub fn derive_initial_state(req: &GaitRequest) -> Result<InitialState> {
    req.validate()?;
    let profile = req.profile()?;
    let models = speed_models(req.v_des, &profile)?;
    let (cop_left, cop_right) = req.initial_feet.unwrap_or_else(|| {
        let half = 0.5 * models.step_width;
        (Point2::new(0.0, half), Point2::new(0.0, -half))
    });
    if !(cop_left.y > cop_right.y) {
        return Err(GaitError::InvalidInitialPosture(format!(
            "left CoP (y={}) must lie left of the right CoP (y={})",
            cop_left.y, cop_right.y
        )));
    }
    let stagger = cop_left.x - cop_right.x;
    let reach = 2.0 * profile.max_half_step();
    if stagger.abs() > reach {
        return Err(GaitError::InvalidInitialPosture(format!(
            "feet are {:.4} m apart along the walk, beyond the {:.4} m reach",
            stagger.abs(),
            reach
        )));
    }
    let (support, phase0, x0) = if stagger.abs() <= ABREAST_TOLERANCE {
        let support = req.first_support;
        let phase0 = match support {
            Side::Left => 0.0,
            Side::Right => PI,
        };
        let x = match support {
            Side::Left => cop_left.x,
            Side::Right => cop_right.x,
        };
        (support, phase0, x)
    } else if stagger > 0.0 {
        (
            Side::Left,
            3.0 * FRAC_PI_2,
            0.5 * (cop_left.x + cop_right.x),
        )
    } else {
        (Side::Right, FRAC_PI_2, 0.5 * (cop_left.x + cop_right.x))
    };
    let mut feet = FeetState::new(cop_left, cop_right, support);
    feet.swing_clearance = req.swing_clearance;
    let y_mid = feet.cop(support).y - support.sign() * 0.5 * models.step_width;
    Ok(InitialState {
        phase0,
        natural_frequency: profile.natural_frequency,
        models,
        profile,
        feet,
        trajectory: ComTrajectory {
            models,
            phase0,
            x0,
            y_mid,
        },
    })
}

/// One support exchange and the swing that precedes it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepPlan {
    pub index: usize,
    /// Leg carrying the body until the exchange.
    pub stance: Side,
    pub stance_cop: Point2<f64>,
    /// Where the swing foot leaves from.
    pub lift_cop: Point2<f64>,
    pub landing: Point2<f64>,
    pub t_lift: f64,
    pub t_land: f64,
    /// Support exchange on the saddle via point.
    pub t_exchange: f64,
    pub event: AnkleEvent,
    /// CoM height difference between the two legs at the exchange, m.
    pub handoff_jump: f64,
}

impl StepPlan {
    pub fn swing(&self) -> Side {
        self.stance.other()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanSample {
    pub t: f64,
    pub com: Point3<f64>,
    pub cop_left: Point2<f64>,
    pub cop_right: Point2<f64>,
    /// Foot positions including the swing arch.
    pub foot_left: Point3<f64>,
    pub foot_right: Point3<f64>,
    pub phase: GaitPhase,
    /// Step whose exchange is next (or last, after the final exchange).
    pub step: usize,
    pub stance_cop: Point2<f64>,
    pub leg_length: f64,
    pub theta_to: f64,
    pub theta_hs: f64,
    pub s_sl_pend: f64,
    pub s_sl_jump: f64,
    pub s_sw: f64,
    /// CoM inside the instantaneous BoS.
    pub in_bos: bool,
    /// CoM inside the expected BoS of the current step.
    pub in_ebos: bool,
    pub energy: EnergyState,
    pub static_capture: bool,
    /// Segment margin from the previous sample.
    pub lyapunov_margin: f64,
    pub energy_rate_ok: bool,
}

impl PlanSample {
    pub fn support(&self) -> Side {
        self.phase.support
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityReport {
    pub min_s_sl_pend: f64,
    pub min_s_sl_jump: f64,
    pub min_s_sw: f64,
    pub bos_fraction: f64,
    pub ebos_fraction: f64,
    /// Every I-BoS exit lies within a quarter step of an exchange.
    pub exits_near_transitions: bool,
    /// CoM inside the E-BoS at every via point instant.
    pub ebos_at_boundaries: bool,
    pub capture_fraction: f64,
    pub min_lyapunov_margin: f64,
    pub energy_rate_violations: usize,
    pub max_handoff_jump: f64,
    pub vertical_excursion: f64,
    pub vertical_target: f64,
}

impl StabilityReport {
    pub fn vertical_error(&self) -> f64 {
        (self.vertical_excursion - self.vertical_target).abs() / self.vertical_target
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryLog {
    pub request: GaitRequest,
    pub initial: InitialState,
    /// The requested steps, in order.
    pub steps: Vec<StepPlan>,
    /// The exchange after the walk, planned only for its toe-off.
    pub lookahead: StepPlan,
    /// Predicted via points at the start of every stride.
    pub via_points: Vec<ViaPointSet>,
    pub samples: Vec<PlanSample>,
    pub report: StabilityReport,
}

impl TrajectoryLog {
    pub fn duration(&self) -> f64 {
        self.request.n_steps as f64 * self.initial.models.step_duration()
    }
}

/// A planned schedule of exchanges, queried at arbitrary times.
#[derive(Debug, Clone)]
pub struct Planner {
    pub initial: InitialState,
    /// Requested steps followed by the lookahead exchange.
    pub steps: Vec<StepPlan>,
    rigid: bool,
    clearance: f64,
}

impl Planner {
    pub fn new(req: &GaitRequest) -> Result<Self> {
        let initial = derive_initial_state(req)?;
        let traj = initial.trajectory;
        let models = initial.models;
        let profile = initial.profile;
        let exchanges: Vec<f64> = traj.saddles_after(0.0).take(req.n_steps + 1).collect();

        let mut steps = Vec::with_capacity(exchanges.len());
        let mut feet = initial.feet;
        let mut t_prev = 0.0;
        for (j, &ts) in exchanges.iter().enumerate() {
            let wrap = |e: GaitError| e.at_step(j, ts);
            let stance = feet.support;
            let stance_cop = feet.cop(stance);
            let swing = stance.other();
            let slope = line_slope(stance_cop, traj.transverse(ts));
            let landing =
                swing_target(stance_cop, swing, models.step_width, slope).map_err(wrap)?;
            let event = if req.rigid_pendulum {
                rigid_event(ts, stance, profile.pivot_distance)
            } else {
                ankle::ankle_event(
                    &models,
                    &profile,
                    ts - models.quarter_duration(),
                    |t| traj.transverse(t),
                    stance_cop,
                    stance,
                    req.max_theta_hs,
                )
                .map_err(wrap)?
            };
            if !(event.t_hs > t_prev) {
                return Err(wrap(GaitError::InvalidInput(format!(
                    "heel strike at {:.4} s precedes the swing lift at {:.4} s",
                    event.t_hs, t_prev
                ))));
            }
            steps.push(StepPlan {
                index: j,
                stance,
                stance_cop,
                lift_cop: feet.cop(swing),
                landing,
                t_lift: t_prev,
                t_land: event.t_hs,
                t_exchange: ts,
                event,
                handoff_jump: 0.0,
            });
            feet.set_cop(swing, landing);
            feet.support = swing;
            t_prev = ts;
        }

        let mut planner = Self {
            initial,
            steps,
            rigid: req.rigid_pendulum,
            clearance: req.swing_clearance,
        };
        if !planner.rigid {
            planner.calibrate_heel_levers()?;
        }
        for j in 0..planner.steps.len() {
            let s = planner.steps[j];
            let trail = planner.height_via(s.stance, s.stance_cop, s.t_exchange);
            let lead = planner.height_via(s.swing(), s.landing, s.t_exchange);
            planner.steps[j].handoff_jump = match (trail, lead) {
                (Ok(a), Ok(b)) => (a - b).abs(),
                (Err(e), _) | (_, Err(e)) => return Err(e.at_step(j, s.t_exchange)),
            };
        }
        Ok(planner)
    }

    /// Sets each heel lever so the landing leg takes over the CoM at the
    /// height the trailing leg holds at the exchange.
    fn calibrate_heel_levers(&mut self) -> Result<()> {
        let traj = self.initial.trajectory;
        let l_p = self.initial.profile.pendulum_length;
        for j in 0..self.steps.len() {
            let s = self.steps[j];
            let ts = s.t_exchange;
            let com = traj.transverse(ts);
            let z_trail = self
                .height_via(s.stance, s.stance_cop, ts)
                .map_err(|e| e.at_step(j, ts))?;
            let others: f64 = self
                .events()
                .enumerate()
                .filter(|&(i, _)| i != j)
                .map(|(_, e)| e.elongation(ts, s.swing()))
                .sum();
            let reach = (com - s.landing).norm_squared();
            let need = (z_trail * z_trail + reach).sqrt() - l_p - others;
            let lever = ankle::heel_lever_for(&s.event, ts, need).map_err(|e| e.at_step(j, ts))?;
            self.steps[j].event.hs_lever = lever;
        }
        Ok(())
    }

    fn events(&self) -> impl Iterator<Item = &AnkleEvent> + '_ {
        self.steps.iter().map(|s| &s.event)
    }

    /// Loaded length of `side`'s leg at `t`.
    pub fn leg_length(&self, side: Side, t: f64) -> f64 {
        let l_p = self.initial.profile.pendulum_length;
        if self.rigid {
            return l_p;
        }
        l_p + self.events().map(|e| e.elongation(t, side)).sum::<f64>()
    }

    /// CoM height if `side`'s leg, standing on `cop`, carried the body at `t`.
    pub fn height_via(&self, side: Side, cop: Point2<f64>, t: f64) -> Result<f64> {
        let com = self.initial.trajectory.transverse(t);
        com::com_vertical(t, com, cop, self.leg_length(side, t))
    }

    /// Index of the step whose exchange is next at `t`, saturating at the
    /// lookahead.
    fn step_at(&self, t: f64) -> usize {
        let traj = &self.initial.trajectory;
        self.steps
            .iter()
            .position(|s| !traj.reached(t, s.t_exchange))
            .unwrap_or(self.steps.len() - 1)
    }

    /// Both feet at `t`: CoP positions and 3D foot points with the swing arch.
    pub fn feet_at(&self, t: f64) -> Result<(FeetState, Point3<f64>, Point3<f64>)> {
        let mut feet = self.initial.feet;
        let lift = |p: Point2<f64>| Point3::new(p.x, p.y, 0.0);
        let mut foot = [lift(feet.cop_left), lift(feet.cop_right)];
        let slot = |side: Side| match side {
            Side::Left => 0,
            Side::Right => 1,
        };
        for s in &self.steps {
            let swing = s.swing();
            if t >= s.t_land {
                feet.set_cop(swing, s.landing);
                foot[slot(swing)] = lift(s.landing);
            } else if t >= s.t_lift {
                let p = foot::swing_trajectory(
                    t,
                    lift(s.lift_cop),
                    lift(s.landing),
                    s.t_lift,
                    s.t_land,
                    self.clearance,
                )?;
                feet.set_cop(swing, p.xy());
                feet.swing_progress = foot::swing_progress(t, s.t_lift, s.t_land);
                foot[slot(swing)] = p;
                break;
            } else {
                break;
            }
        }
        feet.support = self.initial.trajectory.phase(t).support;
        Ok((feet, foot[0], foot[1]))
    }

    /// Stance CoP of the leg supporting the body at `t`.
    fn stance_cop_at(&self, t: f64) -> (Side, Point2<f64>) {
        let traj = &self.initial.trajectory;
        let mut side = self.initial.feet.support;
        let mut cop = self.initial.feet.cop(side);
        for s in &self.steps {
            if traj.reached(t, s.t_exchange) {
                side = s.swing();
                cop = s.landing;
            }
        }
        (side, cop)
    }
}

fn rigid_event(t_exchange: f64, trailing: Side, d_h: f64) -> AnkleEvent {
    AnkleEvent {
        t_hs: t_exchange,
        max_theta_hs: 0.0,
        max_theta_to: 0.0,
        l_p0: 0.0,
        tau: ANKLE_TAU,
        to_lever: d_h,
        hs_lever: d_h,
        trailing,
    }
}

/// Plans and samples a whole walk.
pub fn plan_walk(req: &GaitRequest) -> Result<TrajectoryLog> {
    let planner = Planner::new(req)?;
    let initial = planner.initial;
    let models = initial.models;
    let profile = initial.profile;
    let traj = initial.trajectory;
    let d_h = profile.pivot_distance;

    let duration = req.n_steps as f64 * models.step_duration();
    let n = (duration / req.dt + 1e-9).floor() as usize + 1;

    let mut samples = Vec::with_capacity(n);
    let mut u_mos = Vec::with_capacity(n);
    for k in 0..n {
        let t = k as f64 * req.dt;
        let j = planner.step_at(t);
        let step = &planner.steps[j];
        let wrap = |e: GaitError| e.at_step(j, t);

        let phase = traj.phase(t);
        let (support, stance_cop) = planner.stance_cop_at(t);
        debug_assert_eq!(support, phase.support);
        let (feet, foot_left, foot_right) = planner.feet_at(t).map_err(wrap)?;
        let xy = traj.transverse(t);
        let leg_length = planner.leg_length(support, t);
        let z = com::com_vertical(t, xy, stance_cop, leg_length).map_err(wrap)?;

        let (theta_to, theta_hs) = if planner.rigid {
            (0.0, 0.0)
        } else {
            nearest_event_angles(&planner, t)
        };

        let half_step = (traj.transverse(step.t_exchange).x - stance_cop.x).abs();
        let (s_sl_pend, s_sl_jump) =
            step_stability(half_step, &models, &models.bounds).map_err(wrap)?;
        let s_sw = ml_stability(xy.y - traj.y_mid, &models);

        let ibos = BosRegion::from_cops(feet.cop_left, feet.cop_right, d_h).map_err(wrap)?;
        let (el, er) = match step.stance {
            Side::Left => (step.stance_cop, step.landing),
            Side::Right => (step.landing, step.stance_cop),
        };
        let ebos = BosRegion::from_cops(el, er, d_h).map_err(wrap)?;
        let border = ibos.nearest_boundary_point(&xy);
        u_mos.push(energy::mos_potential(&profile, stance_cop, border));

        samples.push(PlanSample {
            t,
            com: Point3::new(xy.x, xy.y, z),
            cop_left: feet.cop_left,
            cop_right: feet.cop_right,
            foot_left,
            foot_right,
            phase,
            step: j,
            stance_cop,
            leg_length,
            theta_to,
            theta_hs,
            s_sl_pend,
            s_sl_jump,
            s_sw,
            in_bos: ibos.contains(&xy),
            in_ebos: ebos.contains(&xy),
            energy: EnergyState {
                u: 0.0,
                k: 0.0,
                w: 0.0,
                e_p: 0.0,
                u_mos: 0.0,
                k_des: 0.0,
                one_sided: false,
            },
            static_capture: false,
            lyapunov_margin: 0.0,
            energy_rate_ok: true,
        });
    }

    let budget = req.budget(&profile);
    if samples.len() >= 2 {
        let ts: Vec<f64> = samples.iter().map(|s| s.t).collect();
        let coms: Vec<Point3<f64>> = samples.iter().map(|s| s.com).collect();
        let states = energy::energy_series(&ts, &coms, &u_mos, &profile, &budget)?;
        for (s, e) in samples.iter_mut().zip(&states) {
            s.energy = *e;
            s.static_capture = energy::static_capture(e);
        }
        for k in 0..samples.len() {
            let a = &states[k.saturating_sub(1)];
            samples[k].lyapunov_margin = energy::lyapunov_margin(a, &states[k], budget.w_c);
        }
        if samples.len() >= 3 {
            let mech: Vec<f64> = states.iter().map(|e| e.mechanical()).collect();
            let rate = budget.w_c * models.cadence;
            let ok = energy::energy_rate_check(&mech, req.dt, rate)?;
            for (s, ok) in samples.iter_mut().zip(ok) {
                s.energy_rate_ok = ok;
            }
        }
    }

    let lookahead = *planner
        .steps
        .last()
        .expect("lookahead step is always planned");
    let steps = planner.steps[..req.n_steps].to_vec();
    let report = build_report(&planner, &samples, &steps, &lookahead)?;
    let via_points = stride_via_points(&planner, duration)?;

    Ok(TrajectoryLog {
        request: req.clone(),
        initial,
        steps,
        lookahead,
        via_points,
        samples,
        report,
    })
}

/// Windowed ankle angles of the event closest to `t`.
fn nearest_event_angles(planner: &Planner, t: f64) -> (f64, f64) {
    planner
        .events()
        .min_by(|a, b| (a.t_hs - t).abs().total_cmp(&(b.t_hs - t).abs()))
        .map(|e| ankle::windowed_angles(t, e))
        .unwrap_or((0.0, 0.0))
}

fn stride_via_points(planner: &Planner, duration: f64) -> Result<Vec<ViaPointSet>> {
    let traj = &planner.initial.trajectory;
    let stride = planner.initial.models.stride_duration();
    let mut out = Vec::new();
    let mut t = 0.0;
    while t < duration - 1e-9 {
        let (mut feet, _, _) = planner.feet_at(t)?;
        // a foot in the air is treated as already on its target
        let (support, _) = planner.stance_cop_at(t);
        feet.support = support;
        for s in &planner.steps {
            if t >= s.t_lift && t < s.t_land {
                feet.set_cop(s.swing(), s.lift_cop);
            }
        }
        out.push(com::via_points(traj, &feet, t)?);
        t += stride;
    }
    Ok(out)
}

fn build_report(
    planner: &Planner,
    samples: &[PlanSample],
    steps: &[StepPlan],
    lookahead: &StepPlan,
) -> Result<StabilityReport> {
    let models = planner.initial.models;
    let traj = &planner.initial.trajectory;
    let d_h = planner.initial.profile.pivot_distance;
    let n = samples.len().max(1) as f64;
    let min = |f: fn(&PlanSample) -> f64| samples.iter().map(f).fold(f64::INFINITY, f64::min);
    let count = |f: fn(&PlanSample) -> bool| samples.iter().filter(|s| f(s)).count() as f64;

    let exchanges: Vec<f64> = steps
        .iter()
        .chain(std::iter::once(lookahead))
        .map(|s| s.t_exchange)
        .collect();
    let near = 0.5 * models.quarter_duration();
    // exchanges before t = 0 bound the first half step too
    let first_prev = exchanges.first().map(|t| t - models.step_duration());
    let exits_near_transitions = samples.iter().filter(|s| !s.in_bos).all(|s| {
        exchanges
            .iter()
            .chain(first_prev.iter())
            .any(|ts| (s.t - ts).abs() <= near)
    });

    let mut ebos_at_boundaries = true;
    let duration = steps.len() as f64 * models.step_duration();
    for (tb, _) in traj
        .boundaries_after(-1e-12)
        .take_while(|(t, _)| *t <= duration + 1e-9)
    {
        let s = steps
            .iter()
            .chain(std::iter::once(lookahead))
            .find(|s| !traj.reached(tb, s.t_exchange) || (tb - s.t_exchange).abs() < 1e-12)
            .unwrap_or(lookahead);
        let (el, er) = match s.stance {
            Side::Left => (s.stance_cop, s.landing),
            Side::Right => (s.landing, s.stance_cop),
        };
        let region = BosRegion::from_cops(el, er, d_h)?;
        ebos_at_boundaries &= region.contains(&traj.transverse(tb));
    }

    let (zmin, zmax) = samples
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| {
            (lo.min(s.com.z), hi.max(s.com.z))
        });

    Ok(StabilityReport {
        min_s_sl_pend: min(|s| s.s_sl_pend),
        min_s_sl_jump: min(|s| s.s_sl_jump),
        min_s_sw: min(|s| s.s_sw),
        bos_fraction: count(|s| s.in_bos) / n,
        ebos_fraction: count(|s| s.in_ebos) / n,
        exits_near_transitions,
        ebos_at_boundaries,
        capture_fraction: count(|s| s.static_capture) / n,
        min_lyapunov_margin: min(|s| s.lyapunov_margin),
        energy_rate_violations: samples.iter().filter(|s| !s.energy_rate_ok).count(),
        max_handoff_jump: steps.iter().map(|s| s.handoff_jump).fold(0.0, f64::max),
        vertical_excursion: zmax - zmin,
        vertical_target: models.vertical_amplitude,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn request(v: f64, deg: f64, n: usize) -> GaitRequest {
        GaitRequest::new(v, deg.to_radians(), n, 1.79, 63.3)
    }

    #[test]
    fn initial_phase_from_feet() {
        let req = request(1.0, 10.0, 2);
        let s = derive_initial_state(&req).unwrap();
        assert_eq!(s.phase0, 0.0);
        assert_eq!(s.feet.support, Side::Left);
        assert_relative_eq!(s.natural_frequency, 3.100777188195261, epsilon = 1e-12);

        let right = GaitRequest {
            first_support: Side::Right,
            ..req.clone()
        };
        assert_eq!(derive_initial_state(&right).unwrap().phase0, PI);

        let staggered = GaitRequest {
            initial_feet: Some((Point2::new(0.3, 0.066), Point2::new(0.0, -0.066))),
            ..req.clone()
        };
        let s = derive_initial_state(&staggered).unwrap();
        assert_eq!(s.feet.support, Side::Left);
        assert_relative_eq!(s.phase0, 1.5 * PI);
        assert_relative_eq!(s.trajectory.transverse(0.0).x, 0.15);
    }

    #[test]
    fn rejects_bad_postures_and_requests() {
        let req = request(1.0, 10.0, 2);
        let crossed = GaitRequest {
            initial_feet: Some((Point2::new(0.0, -0.1), Point2::new(0.0, 0.1))),
            ..req.clone()
        };
        assert!(matches!(
            derive_initial_state(&crossed),
            Err(GaitError::InvalidInitialPosture(_))
        ));
        let split = GaitRequest {
            initial_feet: Some((Point2::new(1.5, 0.1), Point2::new(0.0, -0.1))),
            ..req.clone()
        };
        assert!(derive_initial_state(&split).is_err());
        assert!(plan_walk(&request(3.1, 10.0, 2)).is_err());
        assert!(plan_walk(&request(1.0, 0.0, 2)).is_err());
        assert!(plan_walk(&request(1.0, 31.0, 2)).is_err());
        assert!(plan_walk(&request(1.0, 10.0, 0)).is_err());
    }

    #[test]
    fn two_step_walk() {
        let log = plan_walk(&request(1.0, 10.0, 2)).unwrap();
        assert_eq!(log.samples.len(), 16);
        assert_eq!(log.steps.len(), 2);
        let m = log.initial.models;
        let last = log.steps.last().unwrap();
        assert_relative_eq!(last.landing.x, 2.0 * m.step_length, epsilon = 1e-9);
        assert_relative_eq!(
            log.initial.trajectory.transverse(log.duration()).x,
            2.0 * m.step_length,
            epsilon = 1e-9
        );
        for w in log.samples.windows(2) {
            assert_relative_eq!(w[1].t - w[0].t, 0.08, epsilon = 1e-12);
        }
    }

    #[test]
    fn handoff_is_continuous() {
        for v in [0.7, 1.0, 1.2, 1.6] {
            for deg in [5.0, 10.0, 15.0] {
                let log = plan_walk(&request(v, deg, 6)).unwrap();
                assert!(log.report.max_handoff_jump < 1e-9, "v={v} deg={deg}");
            }
        }
    }

    #[test]
    fn landing_is_collinear_and_alternating() {
        let log = plan_walk(&request(1.2, 10.0, 6)).unwrap();
        let traj = log.initial.trajectory;
        let m = log.initial.models;
        let mut prev: Option<StepPlan> = None;
        for s in &log.steps {
            let com = traj.transverse(s.t_exchange);
            let (a, b) = (s.landing - s.stance_cop, com - s.stance_cop);
            assert!((a.x * b.y - a.y * b.x).abs() / a.norm() < 1e-6);
            assert_relative_eq!(
                (s.landing.y - s.stance_cop.y).abs(),
                m.step_width,
                epsilon = 1e-9
            );
            if let Some(p) = prev {
                assert_eq!(p.swing(), s.stance);
                assert_relative_eq!(s.landing.x - p.landing.x, m.step_length, epsilon = 1e-6);
            }
            prev = Some(*s);
        }
    }

    #[test]
    fn height_at_heel_strike_hits_target() {
        let log = plan_walk(&request(1.0, 10.0, 4)).unwrap();
        let planner = Planner::new(&log.request).unwrap();
        let l_p = log.initial.profile.pendulum_length;
        let dz = log.initial.models.vertical_amplitude;
        for s in &log.steps[1..] {
            let z = planner
                .height_via(s.stance, s.stance_cop, s.event.t_hs)
                .unwrap();
            assert_relative_eq!(z, l_p - dz, epsilon = 1e-6);
        }
    }

    #[test]
    fn stance_cop_is_stationary() {
        let log = plan_walk(&request(1.0, 10.0, 6)).unwrap();
        for w in log.samples.windows(2) {
            if w[0].support() == w[1].support() {
                assert_eq!(w[0].stance_cop, w[1].stance_cop);
            }
        }
        for s in &log.samples {
            let cop = match s.support() {
                Side::Left => s.cop_left,
                Side::Right => s.cop_right,
            };
            assert_eq!(cop, s.stance_cop);
        }
    }

    #[test]
    fn rigid_baseline_keeps_leg_length() {
        let req = GaitRequest {
            rigid_pendulum: true,
            ..request(1.0, 10.0, 4)
        };
        let log = plan_walk(&req).unwrap();
        for s in &log.samples {
            assert_eq!(s.leg_length, log.initial.profile.pendulum_length);
            assert_eq!((s.theta_to, s.theta_hs), (0.0, 0.0));
        }
    }

    #[test]
    fn deterministic() {
        let a = plan_walk(&request(1.6, 15.0, 8)).unwrap();
        let b = plan_walk(&request(1.6, 15.0, 8)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn staggered_start_walks() {
        let m = speed_models(1.0, &AnthroProfile::new(1.79, 63.3).unwrap()).unwrap();
        let req = GaitRequest {
            initial_feet: Some((
                Point2::new(m.step_length, 0.5 * m.step_width),
                Point2::new(0.0, -0.5 * m.step_width),
            )),
            ..request(1.0, 10.0, 4)
        };
        let log = plan_walk(&req).unwrap();
        assert_eq!(log.steps[0].stance, Side::Left);
        assert_relative_eq!(log.steps[0].landing.x, 2.0 * m.step_length, epsilon = 1e-9);
        assert!(log.report.max_handoff_jump < 1e-9);
    }

    #[test]
    fn errors_carry_step_context() {
        let req = GaitRequest {
            pivot_distance: 0.001,
            ..request(1.6, 10.0, 2)
        };
        match plan_walk(&req) {
            Err(GaitError::AtStep { step, source, .. }) => {
                assert_eq!(step, 0);
                assert!(matches!(*source, GaitError::UnreachableElongation { .. }));
            }
            other => panic!("expected a step error, got {other:?}"),
        }
    }
}
