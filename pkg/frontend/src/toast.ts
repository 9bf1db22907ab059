/** Non-blocking notifications; errors stay a little longer. */

export function toast(message: string, isError = false): void {
  const host = document.getElementById("toasts");
  if (!host) return;
  const node = document.createElement("div");
  node.className = isError ? "toast toast-error" : "toast";
  node.textContent = message;
  host.appendChild(node);
  setTimeout(() => node.remove(), isError ? 6000 : 3000);
}
