//! Live sessions over websocket. Each connection owns a simulator stepped at
//! 20 Hz; the client steers the intruder.

use std::net::{SocketAddr, TcpListener, TcpStream};
use std::sync::Arc;
use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tungstenite::{Message, WebSocket};

use crate::deploy::DeploymentPlan;
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::simulate::{Policy, SimConfig, SimState, Simulator, SteerInput};

pub const TICK: Duration = Duration::from_millis(50);

/// Messages a client may send.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ClientMessage {
    Steer { heading: Point, magnitude: f64 },
    Reset,
}

/// Base config of a session: steered policy, no inputs yet.
pub fn session_config(plan: &DeploymentPlan, seed: u64) -> SimConfig {
    SimConfig::new(plan, Policy::Steered { inputs: vec![] }, 0, seed)
}

/// Simulation state of one connection, without the transport.
pub struct Session<'a> {
    plan: &'a DeploymentPlan,
    base: SimConfig,
    sim: Simulator<'a>,
    inputs: Vec<SteerInput>,
}

impl<'a> Session<'a> {
    pub fn new(plan: &'a DeploymentPlan, base: SimConfig) -> Result<Session<'a>> {
        if !matches!(base.policy, Policy::Steered { .. }) {
            return Err(Error::ConfigInvalid("sessions use the steered policy".into()));
        }
        let sim = Simulator::new(plan, base.clone())?;
        Ok(Session {
            plan,
            base,
            sim,
            inputs: vec![],
        })
    }

    pub fn hello(&self) -> Value {
        json!({
            "kind": "hello",
            "polygon": self.plan.polygon,
            "plan": self.plan,
            "config": self.base,
            "dt": self.sim.dt(),
        })
    }

    pub fn state(&self) -> &SimState {
        self.sim.state()
    }

    pub fn state_message(&self) -> Value {
        let mut v = serde_json::to_value(self.sim.state()).unwrap_or(Value::Null);
        if let Value::Object(m) = &mut v {
            m.insert("kind".into(), "state".into());
        }
        v
    }

    pub fn tick(&mut self) -> &SimState {
        self.sim.step()
    }

    /// Applies one client message; a reply is returned for rejected ones.
    pub fn handle(&mut self, text: &str) -> Option<Value> {
        match serde_json::from_str::<ClientMessage>(text) {
            Ok(ClientMessage::Steer { heading, magnitude }) => {
                if !(heading.x.is_finite() && heading.y.is_finite() && magnitude.is_finite()) {
                    return Some(error_message("steer values must be finite"));
                }
                self.inputs.push(SteerInput {
                    step: self.sim.state().step + 1,
                    heading,
                    magnitude,
                });
                self.sim.steer(heading, magnitude);
                None
            }
            Ok(ClientMessage::Reset) => match Simulator::new(self.plan, self.base.clone()) {
                Ok(sim) => {
                    self.sim = sim;
                    self.inputs.clear();
                    None
                }
                Err(e) => Some(error_message(&e.to_string())),
            },
            Err(e) => Some(error_message(&format!("malformed message: {e}"))),
        }
    }

    /// Config that replays the session so far with the batch simulator.
    pub fn recording(&self) -> SimConfig {
        SimConfig {
            steps: self.sim.state().step,
            policy: Policy::Steered {
                inputs: self.inputs.clone(),
            },
            ..self.base.clone()
        }
    }
}

fn error_message(msg: &str) -> Value {
    json!({"kind": "error", "message": msg})
}

pub struct Server {
    listener: TcpListener,
    plan: Arc<DeploymentPlan>,
    base: SimConfig,
}

impl Server {
    /// Binds the listening socket; a busy port is an error.
    pub fn bind(plan: DeploymentPlan, addr: &str, base: SimConfig) -> Result<Server> {
        // fail early on configs a session cannot run
        Session::new(&plan, base.clone())?;
        let listener = TcpListener::bind(addr)
            .map_err(|e| Error::ConfigInvalid(format!("cannot listen on {addr}: {e}")))?;
        Ok(Server {
            listener,
            plan: Arc::new(plan),
            base,
        })
    }

    pub fn local_addr(&self) -> Result<SocketAddr> {
        Ok(self.listener.local_addr()?)
    }

    /// Accepts connections forever, one thread each.
    pub fn run(self) -> Result<()> {
        for stream in self.listener.incoming() {
            let Ok(stream) = stream else { continue };
            let plan = Arc::clone(&self.plan);
            let base = self.base.clone();
            thread::spawn(move || {
                let _ = connection(stream, &plan, base);
            });
        }
        Ok(())
    }
}

fn send(ws: &mut WebSocket<TcpStream>, v: &Value) -> std::result::Result<(), tungstenite::Error> {
    ws.send(Message::text(v.to_string()))
}

fn connection(stream: TcpStream, plan: &DeploymentPlan, base: SimConfig) -> std::result::Result<(), tungstenite::Error> {
    stream.set_nodelay(true).ok();
    let mut ws = tungstenite::accept(stream).map_err(|e| match e {
        tungstenite::HandshakeError::Failure(e) => e,
        tungstenite::HandshakeError::Interrupted(_) => tungstenite::Error::ConnectionClosed,
    })?;
    let Ok(mut session) = Session::new(plan, base) else {
        return Ok(());
    };
    send(&mut ws, &session.hello())?;
    let mut next = Instant::now() + TICK;
    loop {
        let now = Instant::now();
        if now >= next {
            session.tick();
            send(&mut ws, &session.state_message())?;
            next += TICK;
            if next < now {
                next = now + TICK;
            }
            continue;
        }
        ws.get_mut().set_read_timeout(Some(next - now)).ok();
        match ws.read() {
            Ok(Message::Text(t)) => {
                if let Some(reply) = session.handle(t.as_str()) {
                    send(&mut ws, &reply)?;
                }
            }
            Ok(Message::Binary(_)) => send(&mut ws, &error_message("binary messages are not supported"))?,
            Ok(Message::Close(_)) => return Ok(()),
            Ok(_) => {}
            Err(tungstenite::Error::Io(e))
                if matches!(e.kind(), std::io::ErrorKind::WouldBlock | std::io::ErrorKind::TimedOut) => {}
            Err(e) => return Err(e),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deploy::deploy_polygon;
    use crate::geometry::SimplePolygon;
    use crate::simulate::run;

    fn crown_plan() -> DeploymentPlan {
        let c = SimplePolygon::new(
            [(0., 0.), (6., 0.), (6., 4.), (5., 1.), (1., 1.), (0., 4.)]
                .iter()
                .map(|&(x, y)| Point::new(x, y))
                .collect(),
        )
        .unwrap();
        deploy_polygon("crown", &c, 1.0).unwrap()
    }

    #[test]
    fn recorded_session_replays_bit_for_bit() {
        let plan = crown_plan();
        let mut s = Session::new(&plan, session_config(&plan, 7)).unwrap();
        let mut live = vec![s.state().clone()];
        for k in 0..300u64 {
            if k % 37 == 0 {
                let a = k as f64 * 0.4;
                let msg = json!({"kind": "steer", "heading": [a.cos(), a.sin()], "magnitude": 0.3 + (k % 5) as f64 * 0.2});
                assert!(s.handle(&msg.to_string()).is_none());
            }
            live.push(s.tick().clone());
        }
        let trace = run(&plan, &s.recording()).unwrap();
        assert_eq!(trace.records, live);
        let moved = live.iter().any(|r| r.intruder != live[0].intruder);
        assert!(moved);
    }

    #[test]
    fn malformed_messages_get_an_error_reply() {
        let plan = crown_plan();
        let mut s = Session::new(&plan, session_config(&plan, 0)).unwrap();
        for bad in ["nope", r#"{"kind":"fly"}"#, r#"{"kind":"steer","heading":[1,0]}"#] {
            let r = s.handle(bad).unwrap();
            assert_eq!(r["kind"], "error");
        }
        s.tick();
        assert_eq!(s.state().step, 1);
    }

    #[test]
    fn reset_restores_the_initial_state() {
        let plan = crown_plan();
        let mut s = Session::new(&plan, session_config(&plan, 0)).unwrap();
        let first = s.state().clone();
        s.handle(r#"{"kind":"steer","heading":[1,0],"magnitude":1}"#);
        for _ in 0..20 {
            s.tick();
        }
        assert!(s.handle(r#"{"kind":"reset"}"#).is_none());
        assert_eq!(s.state(), &first);
        assert!(s.recording().steps == 0);
    }

    #[test]
    fn busy_port_is_an_error() {
        let plan = crown_plan();
        let base = session_config(&plan, 0);
        let a = Server::bind(plan.clone(), "127.0.0.1:0", base.clone()).unwrap();
        let addr = a.local_addr().unwrap().to_string();
        assert!(matches!(Server::bind(plan, &addr, base), Err(Error::ConfigInvalid(_))));
    }

    #[test]
    fn websocket_sessions_are_isolated() {
        let plan = crown_plan();
        let base = session_config(&plan, 0);
        let server = Server::bind(plan, "127.0.0.1:0", base).unwrap();
        let addr = server.local_addr().unwrap();
        thread::spawn(move || server.run());
        let url = format!("ws://{addr}");
        let (mut a, _) = tungstenite::connect(&url).unwrap();
        let (mut b, _) = tungstenite::connect(&url).unwrap();
        let read = |ws: &mut WebSocket<_>| -> Value {
            let m = ws.read().unwrap();
            serde_json::from_str(m.to_text().unwrap()).unwrap()
        };
        let hello = read(&mut a);
        assert_eq!(hello["kind"], "hello");
        assert!(hello["plan"].is_object() && hello["config"].is_object());
        assert_eq!(read(&mut b)["kind"], "hello");
        a.send(Message::text("garbage")).unwrap();
        a.send(Message::text(r#"{"kind":"steer","heading":[1,0],"magnitude":1}"#)).unwrap();
        let mut saw_error = false;
        let mut last_a = Value::Null;
        for _ in 0..40 {
            let m = read(&mut a);
            if m["kind"] == "error" {
                saw_error = true;
            } else {
                assert_eq!(m["kind"], "state");
                last_a = m;
            }
        }
        assert!(saw_error);
        let mut last_b = Value::Null;
        for _ in 0..10 {
            last_b = read(&mut b);
            assert_eq!(last_b["kind"], "state");
        }
        // b never steered, so its intruder has not moved
        let start = &read(&mut b)["intruder"];
        assert_eq!(&last_b["intruder"], start);
        assert_ne!(&last_a["intruder"], start);
    }
}
