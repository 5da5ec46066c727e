// Playback timing for recorded demonstrations. No physics: frames are the
// stored states, shown at the recorded dt scaled by the playback speed.
export function frameForElapsed(elapsedMs, dtMs, speed, totalFrames) {
    if (totalFrames < 1)
        return { frame: 0, done: true };
    const raw = Math.floor((elapsedMs * speed) / dtMs);
    if (raw >= totalFrames - 1)
        return { frame: totalFrames - 1, done: true };
    return { frame: Math.max(raw, 0), done: false };
}
/** Wall duration of a full playback in milliseconds. */
export function playbackDurationMs(dtMs, speed, totalFrames) {
    return (Math.max(totalFrames - 1, 0) * dtMs) / speed;
}
