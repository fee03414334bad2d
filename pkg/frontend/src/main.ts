import { boot } from "./ui";

window.addEventListener("DOMContentLoaded", boot);
