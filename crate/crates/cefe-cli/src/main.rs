//! Command-line front end for the certified everlasting encryption stack.

mod attack;
mod demo;
mod params;
mod profiles;
mod schemes;
mod selftest;
mod util;

use util::{Args, CliResult, Failure, EXIT_OK, EXIT_USAGE};

const USAGE: &str = "\
cefe: certified everlasting encryption toolkit (simulated quantum substrate)

USAGE:
  cefe params check --css p,q,t,k1,k2 [--force]
  cefe params check --feq desk|micro|FILE
  cefe <scheme> <verb> [flags]      scheme: ske pke rnce garble fe1 fead feq
                                    verb:   keygen enc dec del vrfy
  cefe demo <scheme>                scheme: ske pke css rnce garble fe1 fead feq
  cefe attack <scheme> --strategy measure-all --trials N [--csv FILE] [--threads T]
                                    scheme: cd cesk-qrom cepk-qrom cesk-css cepk-css
  cefe selftest

COMMON FLAGS:
  --seed N          deterministic randomness (default 0xCEFE)
  --profile desk|full
  --oracle KEY      shared random-oracle key for file-based flows
  --variant qrom|css   (ske/pke enc)

FILE FLAGS (per verb): --key --pk --sk --msk --mpk --message --ct --vk
  --cert --out --circuit --labels --input --function --coeffs --params
  --bits --k --c1 --c2 --t --p

EXIT CODES: 0 ok, 1 usage, 2 bad envelope, 3 protocol failure, 4 parameter rejection
";

fn dispatch(raw: &[String]) -> CliResult<()> {
    if raw.is_empty() {
        return Err(Failure::usage(USAGE));
    }
    let command = raw[0].as_str();
    let rest = &raw[1..];
    match command {
        "help" | "--help" | "-h" => {
            println!("{USAGE}");
            Ok(())
        }
        "params" => {
            let verb = rest
                .first()
                .ok_or_else(|| Failure::usage("params needs a verb (check)"))?;
            let args = Args::parse(&rest[1..])?;
            params::cmd_params(verb, &args)
        }
        "demo" => {
            let args = Args::parse(rest)?;
            demo::cmd_demo(&args)
        }
        "attack" => {
            let args = Args::parse(rest)?;
            attack::cmd_attack(&args)
        }
        "selftest" => selftest::cmd_selftest(),
        "ske" | "pke" | "rnce" | "garble" | "fe1" | "fead" | "feq" => {
            let verb = rest
                .first()
                .ok_or_else(|| Failure::usage(format!("{command} needs a verb")))?
                .clone();
            let args = Args::parse(&rest[1..])?;
            match command {
                "ske" => schemes::cmd_ske(&verb, &args),
                "pke" => schemes::cmd_pke(&verb, &args),
                "rnce" => schemes::cmd_rnce(&verb, &args),
                "garble" => schemes::cmd_garble(&verb, &args),
                "fe1" => schemes::cmd_fe1(&verb, &args),
                "fead" => schemes::cmd_fead(&verb, &args),
                "feq" => schemes::cmd_feq(&verb, &args),
                _ => unreachable!(),
            }
        }
        other => Err(Failure::usage(format!(
            "unknown command {other:?}; run `cefe help`"
        ))),
    }
}

fn main() {
    let raw: Vec<String> = std::env::args().skip(1).collect();
    match dispatch(&raw) {
        Ok(()) => std::process::exit(EXIT_OK),
        Err(f) => {
            if f.code == EXIT_USAGE {
                eprintln!("usage error: {}", f.message);
            } else {
                eprintln!("error: {}", f.message);
            }
            std::process::exit(f.code);
        }
    }
}
