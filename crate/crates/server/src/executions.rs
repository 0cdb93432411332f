use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use ltqp_align::traversal::{ExecutionReport, ProgressEvent};
use parking_lot::{Mutex, RwLock};
use serde::Serialize;
use tokio::sync::watch;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ExecutionStatus {
    Running,
    Done,
    Failed,
}

/// Status and append-only event log of one execution.
pub struct Execution {
    pub id: String,
    status: Mutex<ExecutionStatus>,
    report: Mutex<Option<ExecutionReport>>,
    events: RwLock<Vec<ProgressEvent>>,
    appended: watch::Sender<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExecutionHandle {
    pub id: String,
    pub status: ExecutionStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<ExecutionReport>,
}

impl Execution {
    fn new(id: String) -> Self {
        Self {
            id,
            status: Mutex::new(ExecutionStatus::Running),
            report: Mutex::new(None),
            events: RwLock::new(Vec::new()),
            appended: watch::channel(0).0,
        }
    }

    pub fn status(&self) -> ExecutionStatus {
        *self.status.lock()
    }

    pub fn handle(&self) -> ExecutionHandle {
        ExecutionHandle {
            id: self.id.clone(),
            status: self.status(),
            report: self.report.lock().clone(),
        }
    }

    /// Append one event. Terminal events settle status and report first so
    /// readers that see them also see the final handle.
    pub fn push(&self, event: ProgressEvent) {
        match &event {
            ProgressEvent::Done { report } => {
                *self.report.lock() = Some((**report).clone());
                *self.status.lock() = ExecutionStatus::Done;
            }
            ProgressEvent::Error { .. } => *self.status.lock() = ExecutionStatus::Failed,
            _ => {}
        }
        let len = {
            let mut events = self.events.write();
            events.push(event);
            events.len()
        };
        self.appended.send_replace(len);
    }

    pub fn event(&self, i: usize) -> Option<ProgressEvent> {
        self.events.read().get(i).cloned()
    }

    pub fn events(&self) -> Vec<ProgressEvent> {
        self.events.read().clone()
    }

    pub fn subscribe(&self) -> watch::Receiver<usize> {
        self.appended.subscribe()
    }
}

#[derive(Default)]
pub struct Executions {
    next: AtomicU64,
    by_id: RwLock<HashMap<String, Arc<Execution>>>,
}

impl Executions {
    pub fn create(&self) -> Arc<Execution> {
        let id = format!("e{}", self.next.fetch_add(1, Ordering::Relaxed) + 1);
        let execution = Arc::new(Execution::new(id.clone()));
        self.by_id.write().insert(id, Arc::clone(&execution));
        execution
    }

    pub fn get(&self, id: &str) -> Option<Arc<Execution>> {
        self.by_id.read().get(id).cloned()
    }
}
