/** Documents exchanged with the preview server. Shapes mirror the config
 * and timeline JSON schemas; the server is the single source of truth. */
export const MODES = ["beats-slow", "beats-fast", "nobeats-slow", "nobeats-fast"];
