//! `params check`: the CSS security-margin gate and the q-bounded FE
//! parameter validation.

use cefe::fe::bounded::FeqParams;
use cefe::gf2::security_margin;

use crate::util::{Args, CliResult, Failure};

pub fn cmd_params(verb: &str, args: &Args) -> CliResult<()> {
    if verb != "check" {
        return Err(Failure::usage(format!("unknown params verb {verb:?}")));
    }
    let mut checked = false;
    if let Some(spec) = args.flag("css") {
        checked = true;
        let fields: Vec<usize> = spec
            .split(',')
            .map(|t| {
                t.trim()
                    .parse()
                    .map_err(|_| Failure::usage(format!("bad --css field {t:?}")))
            })
            .collect::<CliResult<_>>()?;
        let [p, q, t, k1, k2] = fields[..] else {
            return Err(Failure::usage("--css expects p,q,t,k1,k2"));
        };
        if k1 <= k2 {
            return Err(Failure::params(format!("k1 = {k1} must exceed k2 = {k2}")));
        }
        let margin = security_margin(p, q, t, k1, k2);
        println!("css margin: t*p/(p+q) - 4*(k1-k2)*ln2 = {margin:.12}");
        println!("  p={p} q={q} t={t} k1={k1} k2={k2}");
        if margin <= 0.0 {
            if args.switch("force") {
                println!("  margin non-positive; accepted under --force");
            } else {
                return Err(Failure::params(format!(
                    "css margin {margin:.6} is non-positive (use --force to accept anyway)"
                )));
            }
        } else {
            println!("  margin positive: accepted");
        }
    }
    if let Some(path) = args.flag("feq") {
        checked = true;
        let params = match path {
            "desk" => FeqParams::desk_profile(),
            "micro" => FeqParams::micro_profile(),
            other => {
                let text = std::fs::read_to_string(other)
                    .map_err(|e| Failure::usage(format!("cannot read {other}: {e}")))?;
                FeqParams::parse(&text).map_err(|e| Failure::params(e.to_string()))?
            }
        };
        match params.validate() {
            Ok(()) => {
                println!(
                    "feq params: q={} t={} tD+1={} N={} v={} S={} field=GF(2^{}): accepted",
                    params.q_bound,
                    params.t,
                    params.gamma_size(),
                    params.n_instances,
                    params.v,
                    params.s_pads,
                    params.field_k
                );
            }
            Err(e) => return Err(Failure::params(e.to_string())),
        }
    }
    if !checked {
        return Err(Failure::usage(
            "params check needs --css p,q,t,k1,k2 and/or --feq desk|micro|FILE",
        ));
    }
    Ok(())
}
