use crate::error::{check_len, Error, Result};

/// Field sizes a problem declares for its states.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Dims {
    pub n_u: usize,
    pub n_pi: usize,
    pub n_zeta: usize,
}

/// Displacement, velocity and internal variables at one time level.
#[derive(Clone, Debug, PartialEq)]
pub struct State3F {
    pub t: f64,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub pi: Vec<f64>,
    pub zeta: Vec<f64>,
}

impl State3F {
    /// Zero displacement, velocity and slip; undamaged (`zeta = 1`).
    pub fn at_rest(dims: Dims) -> Self {
        State3F {
            t: 0.0,
            u: vec![0.0; dims.n_u],
            v: vec![0.0; dims.n_u],
            pi: vec![0.0; dims.n_pi],
            zeta: vec![1.0; dims.n_zeta],
        }
    }

    pub fn validate(&self, dims: Dims) -> Result<()> {
        check_len("displacement", dims.n_u, self.u.len())?;
        check_len("velocity", dims.n_u, self.v.len())?;
        check_len("internal variable pi", dims.n_pi, self.pi.len())?;
        check_len("damage zeta", dims.n_zeta, self.zeta.len())?;
        let finite = self.t.is_finite()
            && [&self.u, &self.v, &self.pi, &self.zeta]
                .iter()
                .all(|x| x.iter().all(|v| v.is_finite()));
        if !finite {
            return Err(Error::InvalidArgument("state has non-finite entries".into()));
        }
        if let Some(z) = self.zeta.iter().find(|z| !(0.0..=1.0).contains(*z)) {
            return Err(Error::InvalidArgument(format!("damage value {z} outside [0, 1]")));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Scheme {
    #[default]
    CnMonolithic,
    FractionalStep,
    BackwardEuler,
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cn" | "cn_monolithic" | "monolithic" => Ok(Scheme::CnMonolithic),
            "split" | "fractional" | "fractional_step" => Ok(Scheme::FractionalStep),
            "be" | "backward_euler" => Ok(Scheme::BackwardEuler),
            other => Err(Error::Config(format!("unknown scheme '{other}'"))),
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Scheme::CnMonolithic => "cn",
            Scheme::FractionalStep => "split",
            Scheme::BackwardEuler => "be",
        })
    }
}

/// Where in `[t_{k-1}, t_k]` the external loads are sampled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum LoadSampling {
    RightEndpoint,
    #[default]
    Midpoint,
    Average,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SchemeConfig {
    pub tau: f64,
    pub scheme: Scheme,
    pub load_sampling: LoadSampling,
    pub am_tol: f64,
    pub am_maxit: usize,
    pub lin_tol: f64,
}

impl SchemeConfig {
    pub fn new(tau: f64, scheme: Scheme) -> Self {
        SchemeConfig {
            tau,
            scheme,
            load_sampling: LoadSampling::Midpoint,
            am_tol: 1e-12,
            am_maxit: 200,
            lin_tol: 1e-12,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0) || !self.tau.is_finite() {
            return Err(Error::InvalidArgument(format!("time step {} must be > 0", self.tau)));
        }
        if !(self.am_tol > 0.0) || !(self.lin_tol > 0.0) {
            return Err(Error::InvalidArgument("solver tolerances must be > 0".into()));
        }
        if self.am_maxit == 0 {
            return Err(Error::InvalidArgument("am_maxit must be >= 1".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        let dims = Dims {
            n_u: 2,
            n_pi: 1,
            n_zeta: 1,
        };
        let mut s = State3F::at_rest(dims);
        assert!(s.validate(dims).is_ok());
        s.zeta[0] = 1.5;
        assert!(s.validate(dims).is_err());
        s.zeta[0] = 0.5;
        s.u[1] = f64::NAN;
        assert!(s.validate(dims).is_err());
        assert!(matches!(
            State3F::at_rest(dims).validate(Dims { n_u: 3, ..dims }),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(SchemeConfig::new(0.0, Scheme::CnMonolithic).validate().is_err());
    }

    #[test]
    fn scheme_names_round_trip() {
        for s in [Scheme::CnMonolithic, Scheme::FractionalStep, Scheme::BackwardEuler] {
            assert_eq!(s.to_string().parse::<Scheme>().unwrap(), s);
        }
        assert!("rk4".parse::<Scheme>().is_err());
    }
}
