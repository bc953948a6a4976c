//! Logger that forwards to `env_logger` and also records warnings raised on
//! the current thread while a capture is active.

use std::cell::RefCell;
use std::sync::Once;

use log::{Level, LevelFilter, Log, Metadata, Record};

thread_local! {
    static SINK: RefCell<Option<Vec<String>>> = const { RefCell::new(None) };
}

static INSTALL: Once = Once::new();

struct CaptureLogger {
    inner: env_logger::Logger,
}

impl Log for CaptureLogger {
    fn enabled(&self, metadata: &Metadata) -> bool {
        metadata.level() <= Level::Warn || self.inner.enabled(metadata)
    }

    fn log(&self, record: &Record) {
        if record.level() <= Level::Warn {
            SINK.with(|s| {
                if let Some(v) = s.borrow_mut().as_mut() {
                    v.push(format!(
                        "{} [{}] {}",
                        record.level(),
                        record.target(),
                        record.args()
                    ));
                }
            });
        }
        if self.inner.matches(record) {
            self.inner.log(record);
        }
    }

    fn flush(&self) {
        self.inner.flush();
    }
}

/// Installs the process logger once. `default_filter` applies when
/// `RUST_LOG` is unset. Has no effect if another logger is already set.
pub fn install(default_filter: &str) {
    INSTALL.call_once(|| {
        let inner = env_logger::Builder::from_env(
            env_logger::Env::default().default_filter_or(default_filter),
        )
        .build();
        let max = inner.filter().max(LevelFilter::Warn);
        if log::set_boxed_logger(Box::new(CaptureLogger { inner })).is_ok() {
            log::set_max_level(max);
        }
    });
}

/// Collects warnings logged on this thread until [`WarningCapture::finish`].
/// Captures nest; the outer one resumes when the inner one ends.
pub struct WarningCapture {
    previous: Option<Vec<String>>,
    finished: bool,
}

impl WarningCapture {
    pub fn start() -> Self {
        WarningCapture {
            previous: SINK.with(|s| s.borrow_mut().replace(Vec::new())),
            finished: false,
        }
    }

    pub fn finish(mut self) -> Vec<String> {
        self.finished = true;
        let previous = self.previous.take();
        SINK.with(|s| std::mem::replace(&mut *s.borrow_mut(), previous))
            .unwrap_or_default()
    }
}

impl Drop for WarningCapture {
    fn drop(&mut self) {
        if !self.finished {
            let previous = self.previous.take();
            SINK.with(|s| *s.borrow_mut() = previous);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn captures_only_warnings_of_this_thread() {
        install("error");
        let cap = WarningCapture::start();
        log::warn!("kept");
        log::info!("dropped");
        std::thread::spawn(|| log::warn!("other thread"))
            .join()
            .unwrap();
        let got = cap.finish();
        assert_eq!(got.len(), 1);
        assert!(got[0].ends_with("kept"));
    }
}
